# -*- coding: utf-8 -*-
"""
Grupo de comandos `kdv`: jerarquía de KdV, solitón real, prueba
algebro-geométrica y flujo de Shiffman sobre una línea del cilindro.

El comando `flow` se registra también en la raíz (`wlab flow`).
"""
import logging

import click
import numpy as np

from wlab import diffpoly
from wlab.aop import audit, metrics, validate_with
from wlab.catalog import require_dz, resolve
from wlab.complexkit import AnalyticFn, SampledLine
from wlab.errors import NotApplicable
from wlab.export import write_csv, write_line
from wlab.kdvflow import (
    algebro_geometric_rank,
    flow_state,
    kdv_invariants,
    kdv_real_evolve,
    shiffman_evolve,
    stationary_check,
    u_from_g,
)
from wlab.runner import emit, family_of, output_path, surface_stem
from wlab.schemas import Report, RunConfig

logger = logging.getLogger(__name__)

CONSERVATION_TOL = 1e-5
LEADING_COEFFICIENT_TOL = 0.05
AG_RESIDUAL_TOL = 1e-6
L2_DRIFT_TOL = 1e-6

FLOW_HEADER = [
    "t", "step", "dz_over_g_drift", "g_dz_drift", "route_discrepancy", "gauge_discrepancy",
    "right_re", "right_im", "right_c2", "left_re", "left_im", "left_c2",
]


@click.group("kdv")
def kdv_group():
    """Maquinaria de la jerarquía de KdV."""


@kdv_group.command("hierarchy")
@click.option("--n", "n", type=click.IntRange(0, 6), default=3, show_default=True)
def hierarchy_command(n):
    """Imprime los polinomios diferenciales P_0 … P_n."""
    for line in diffpoly.hierarchy_text(n):
        click.echo(line)


def soliton_profile(y, c: float, center: float):
    """Solitón de u_t = -u''' - 6uu': (c/2) sech²(√c/2 (y - center))."""
    return 0.5 * c / np.cosh(0.5 * np.sqrt(c) * (y - center)) ** 2


@kdv_group.command("soliton")
@click.option("--speed", type=float, default=16.0, show_default=True)
@click.option("--length", type=float, default=20.0, show_default=True)
@click.option("--samples", "line_samples", type=int, default=256, show_default=True)
@click.option("--dt", type=float, default=1e-4, show_default=True)
@click.option("--horizon", type=float)
@click.option("--output-dir", type=click.Path(file_okay=False))
@click.pass_context
@validate_with(RunConfig)
@audit("kdv soliton")
@metrics
def soliton_command(ctx, speed, length, dt, **options):
    """Evoluciona un solitón y lo compara con su traslación exacta."""
    cfg = ctx.obj["run_config"]
    n = cfg.line_samples
    line = SampledLine(0.0, np.zeros(n), period=length)
    u0 = line.with_values(soliton_profile(line.y, speed, length / 2))
    uT = kdv_real_evolve(u0, cfg.horizon, dt)
    exact = soliton_profile(line.y, speed, length / 2 + speed * cfg.horizon)
    error = float(np.max(np.abs(np.real(uT.values) - exact)) / np.max(exact))
    m0, e0 = kdv_invariants(u0)
    m1, e1 = kdv_invariants(uT)

    report = Report(command="kdv soliton", surface=f"soliton:c={speed:g}")
    report.data.update(mass_drift=abs(m1 - m0), l2_drift=abs(e1 - e0), horizon=cfg.horizon)
    report.check("soliton_translation", "kdv-soliton", error, 1e-4)
    report.check("mass_drift", "kdv-conservation", abs(m1 - m0) / abs(m0), 1e-8)
    report.check("l2_drift", "kdv-conservation", abs(e1 - e0) / abs(e0), L2_DRIFT_TOL)
    rows = zip(line.y, np.real(u0.values), np.real(uT.values), exact)
    write_csv(output_path(cfg, "soliton.csv"), ["y", "u0", "uT", "exact"], rows)
    emit(ctx, report, output_path(cfg, "soliton.json"))


def rational_potential():
    """u = -2/z², jets de Cauchy en una corona alrededor de z = 1."""
    u = AnalyticFn(lambda z: -2.0 / z**2, ((0j, -2),), "-2/z^2")
    points = 1.0 + 0.25 * np.exp(2j * np.pi * np.arange(16) / 16)
    return u, points


def potential(kind: str, cfg):
    if kind == "rational":
        return rational_potential()
    if kind == "constant":
        return SampledLine(0.0, np.ones(cfg.line_samples)), None
    data = require_dz(resolve(cfg.surface if cfg.surface.startswith("riemann") else "riemann", gauge="dz"))
    line = SampledLine(float(data.base_point.real), np.zeros(cfg.line_samples))
    return u_from_g(data, line), None


@kdv_group.command("agtest")
@click.option("--u", "kind", type=click.Choice(["rational", "constant", "riemann"]), default="rational",
              show_default=True)
@click.option("--surface", help="Ejemplo de Riemann para --u riemann.")
@click.option("--n-max", type=int)
@click.option("--line-samples", type=int)
@click.option("--output-dir", type=click.Path(file_okay=False))
@click.pass_context
@validate_with(RunConfig)
@audit("kdv agtest")
@metrics
def agtest_command(ctx, kind, **options):
    """Rango de [∂u/∂t_0 … ∂u/∂t_n] y primera dependencia lineal."""
    cfg = ctx.obj["run_config"]
    u, points = potential(kind, cfg)
    rank = algebro_geometric_rank(u, cfg.n_max, z=points)
    report = Report(command="kdv agtest", surface=kind)
    report.data["rank"] = rank.as_dict()
    if isinstance(u, SampledLine) and kind == "riemann":
        report.data["stationary_deviation"] = stationary_check(u)
    report.check("rank_deficiency", "algebro-geometric", rank.residual if rank.deficient else 1.0,
                 AG_RESIDUAL_TOL)
    if rank.deficient:
        click.echo(f"Dependencia lineal en n={rank.dependent_at} (rango {rank.rank}).")
    else:
        click.echo(f"Sin dependencia hasta n={cfg.n_max} (rango {rank.rank}).")
    emit(ctx, report, output_path(cfg, f"agtest_{kind}.json"))


@click.command("flow")
@click.option("--surface", help="Ejemplo de Riemann, p. ej. riemann:λ=1.")
@click.option("--T", "horizon", type=float, help="Horizonte del flujo, |T| ≤ 0.1.")
@click.option("--dt", "step", type=float, help="Paso inicial.")
@click.option("--tol", type=float, help="Error local admitido por paso.")
@click.option("--gauge", type=float, help="γ = i·gauge.")
@click.option("--line-samples", type=int)
@click.option("--dump-lines", is_flag=True, help="Escribe u, y, g finales como complex64.")
@click.option("--output-dir", type=click.Path(file_okay=False))
@click.pass_context
@validate_with(RunConfig)
@audit("flow")
@metrics
def flow_command(ctx, dump_lines, **options):
    """Flujo de Shiffman con registro de conservación por paso."""
    cfg = ctx.obj["run_config"]
    if family_of(cfg.surface) != "riemann":
        raise NotApplicable(f"el seguimiento de polos necesita un ejemplo de Riemann, no '{cfg.surface}'")
    data = require_dz(resolve(cfg.surface, gauge="dz"))
    state = flow_state(data, n=cfg.line_samples)
    result = shiffman_evolve(state, cfg.horizon, cfg.step, tol=cfg.tol, gauge=1j * cfg.gauge)
    stem = surface_stem(cfg.surface)
    write_csv(output_path(cfg, f"{stem}.flow.csv"), FLOW_HEADER, (row.as_row() for row in result.log))
    if dump_lines:
        for name in ("u", "y", "g"):
            write_line(getattr(result.state, name), output_path(cfg, f"{stem}.{name}.bin"))

    report = Report(command="flow", surface=cfg.surface)
    report.data.update(steps=len(result.log) - 1, horizon=cfg.horizon, gauge=cfg.gauge)
    report.check("period_drift", "period-map-constant", result.max_drift(), CONSERVATION_TOL)
    report.check("route_discrepancy", "dual-route", result.max_route_discrepancy(), CONSERVATION_TOL)
    report.check("gauge_discrepancy", "gauge-consistency", result.max_gauge_discrepancy(),
                 CONSERVATION_TOL)
    report.check("pole_spacing_drift", "pole-spacing", result.spacing_drift(), CONSERVATION_TOL)
    leading = np.concatenate([result.track.leading(label) for label in ("right", "left")])
    report.check("leading_coefficient", "double-pole", float(np.max(np.abs(leading + 2.0))),
                 LEADING_COEFFICIENT_TOL)
    emit(ctx, report, output_path(cfg, f"{stem}.flow.json"))


kdv_group.add_command(flow_command)
