# -*- coding: utf-8 -*-
"""Utilidades compartidas por los comandos: nombres, regiones de mallado e informes."""
import re
from pathlib import Path

import click
import numpy as np

from wlab.catalog import cylinder_constants
from wlab.export import write_json
from wlab.schemas import Report
from wlab.weierstrass import ParamGrid

_UNSAFE = re.compile(r"[^A-Za-z0-9_.-]+")


def surface_stem(name: str) -> str:
    """'riemann:λ=1' -> 'riemann_lambda_1'."""
    text = name.replace("λ", "lambda").replace("ε", "eps")
    return _UNSAFE.sub("_", text).strip("_")


def family_of(name: str) -> str:
    return name.split(":", 1)[0].strip()


def parameter_of(name: str, default: float) -> float:
    """Valor tras '=' en 'riemann:λ=2' o 'perturbed:ε=0.1'."""
    _, _, value = name.partition("=")
    return float(value) if value else default


def surface_grid(data, family: str, ns: int, nt: int) -> ParamGrid:
    """
    Región de mallado por familia. El ejemplo de Riemann usa un dominio
    fundamental de la carta cilíndrica desplazado para no pasar por los fines.
    """
    if family == "plane":
        return ParamGrid((-2.0, 2.0), (-2.0, 2.0), ns, nt)
    if family == "catenoid":
        return ParamGrid((-2.0, 2.0), (0.0, 2 * np.pi), ns, nt, kind="log")
    if family == "helicoid":
        return ParamGrid((-1.5, 1.5), (-np.pi, np.pi), ns, nt)
    if family == "riemann":
        P = cylinder_constants(data.chart.lam).period
        x0 = P / 4 + P / (4 * ns)
        y0 = 0.25 + 1 / 256
        return ParamGrid((x0, x0 + P), (y0, y0 + 1.0), ns, nt)
    return ParamGrid((-0.5, 0.5), (0.0, 1.0), ns, nt)


def output_path(cfg, filename: str) -> Path:
    return Path(cfg.output_dir) / filename


def emit(ctx, report: Report, path: Path) -> None:
    """
    Escribe el informe JSON y termina con código 2 si alguna comprobación falla.
    """
    write_json(report.model_dump(), path)
    click.echo(f"Informe escrito en '{path}'.")
    if not report.passed:
        click.echo(f"Comprobaciones fuera de tolerancia: {', '.join(report.failures())}", err=True)
        ctx.exit(2)
