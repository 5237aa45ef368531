# -*- coding: utf-8 -*-
"""
Comandos `diagnose` y `fit-end`.

`diagnose` reúne las comprobaciones globales de una superficie de catálogo
(fórmula de Jorge-Meeks, flujo, cierre de periodos, monotonía de A(R)/R²,
desigualdad superarmónica, ajuste de fines y curvatura) en un informe JSON.
`fit-end` ajusta x₃ = a log r + b + ... sobre un fin concreto.
"""
import logging

import click
import numpy as np

from wlab.aop import audit, metrics, validate_with
from wlab.catalog import make_riemann, normalize_flux, resolve
from wlab.errors import NotApplicable
from wlab.export import jacobi_rows, write_csv
from wlab.runner import emit, family_of, output_path, parameter_of, surface_grid, surface_stem
from wlab.schemas import Report, RunConfig
from wlab.shiffman import StripGrid, complexified_shiffman, jacobi_residual
from wlab.weierstrass import (
    ChartKind,
    ParamGrid,
    ball_area_profile,
    end_fit,
    flux,
    jorge_meeks_check,
    mesh,
    metric_curvature,
    period_report,
    superharmonic_check,
    total_curvature,
)

logger = logging.getLogger(__name__)

# Parches de la losa 0 ≤ x₃ ≤ 1, r ≥ 1 para la desigualdad superarmónica.
SLABS = {
    "catenoid": ParamGrid((0.2, 2.0), (0.0, 2 * np.pi), 128, 256, kind="log"),
    "helicoid": ParamGrid((0.9, 2.0), (-1.0, 0.0), 128, 128),
    "plane": ParamGrid((0.0, 1.0), (1.0, 2.0), 64, 64),
}

MONOTONICITY_TOL = 1e-6
SUPERHARMONIC_TOL = 1e-6
PLANE_DENSITY_TOL = 0.02
MIDDLE_END_TOL = 1e-3
CURVATURE_REL_TOL = 0.02
SHIFFMAN_TOL = 1e-7

JACOBI_HEADER = ["y", "re_v", "im_v", "residual"]


def end_samples(data, family: str, index: int, R: float):
    """
    Malla de un fin: para la catenoide |z| ∈ [2R, 8R], que r = cosh(log|z|)
    lleva al anillo r ∈ [R, 4R] de end_fit; corona
    ρ ∈ [0.005, 0.02] alrededor del punto del fin en la carta cilíndrica de
    Riemann.
    """
    if family == "catenoid":
        lo, hi = np.log(2 * R) - 0.1, np.log(8 * R) + 0.1
        s_range = (lo, hi) if index == 1 else (-hi, -lo)
        return mesh(data, ParamGrid(s_range, (0.0, 2 * np.pi), 64, 128, kind="log"))
    if family == "riemann":
        center = data.ends[index].location
        grid = ParamGrid((np.log(0.005), np.log(0.02)), (0.0, 2 * np.pi), 32, 128, kind="log", center=center)
        return mesh(data, grid)
    raise NotApplicable(f"'{data.name}' no tiene fines que sean grafos horizontales")


def _jorge_meeks(report: Report, data, genus: int, ends: int) -> None:
    try:
        degree, gap = jorge_meeks_check(data, genus, ends)
    except NotApplicable as e:
        report.data["jorge_meeks"] = f"no aplica: {e}"
        return
    report.data["degree"] = degree
    report.check("jorge_meeks", "jorge-meeks", abs(gap), 0.5)


def _shiffman_field(report: Report, cfg, family: str) -> None:
    """S + iS* en la columna central de una franja cerrada en y, volcado a CSV."""
    data = resolve(cfg.surface, gauge="dz")
    period = complex(data.chart.period)
    if data.chart.kind != ChartKind.CYLINDER or period.real != 0:
        return
    grid = StripGrid(float(data.base_point.real), cfg.line_samples, period=abs(period))
    field = complexified_shiffman(data, grid)
    residual = jacobi_residual(data, field.real, grid)
    center = field.values[grid.half_width]
    path = output_path(cfg, f"{surface_stem(cfg.surface)}.jacobi.csv")
    write_csv(path, JACOBI_HEADER, jacobi_rows(grid.y, center, residual))
    sup = float(np.max(np.abs(center.real)))
    report.data["shiffman"] = {"x0": grid.x0, "sup": sup, "jacobi_residual": residual}
    if family != "perturbed":
        report.check("shiffman_vanishes", "shiffman-function", sup, SHIFFMAN_TOL)


def _monotonicity(report: Report, profile) -> None:
    ratios = np.array([ratio for _, ratio in profile])
    decrease = float(np.max(np.maximum(ratios[:-1] - ratios[1:], 0.0), initial=0.0))
    report.data["ball_area_profile"] = profile
    report.check("monotonicity", "monotonicity", decrease, MONOTONICITY_TOL)


def _superharmonic(report: Report, data, family: str) -> None:
    result = superharmonic_check(data, mesh(data, SLABS[family]))
    report.data["superharmonic"] = result.as_dict()
    report.check("superharmonic", "superharmonic-log-r", result.violation, SUPERHARMONIC_TOL)


def diagnose_catenoid(report: Report, cfg) -> None:
    data = resolve("catenoid")
    _jorge_meeks(report, data, genus=0, ends=2)
    F = flux(data, data.cycle("horizontal"), "horizontal", tol=cfg.quad_tol)
    report.data["flux"] = F.as_dict()
    report.check("flux", "flux-vector", np.linalg.norm(F.F - [0.0, 0.0, 2 * np.pi]), cfg.tol)
    report.check("period_residual", "period-closure", period_report(data).residual, cfg.tol)
    ball = mesh(data, ParamGrid((-3.2, 3.2), (0.0, 2 * np.pi), 640, 256, kind="log"), workers=cfg.threads)
    _monotonicity(report, ball_area_profile(ball, (-1.0, 0.0, 0.0), [1.25, 2.0, 5.0, 10.0]))
    _superharmonic(report, data, "catenoid")
    fit = end_fit(end_samples(data, "catenoid", 1, 100.0), R=100.0)
    report.data["end_fit"] = fit.as_dict()
    report.check("end_fit_log", "catenoidal-end", abs(fit.a - 1.0), 1e-3)
    _, K, _ = metric_curvature(data, np.array([1.0 + 0j]))
    report.check("waist_curvature", "gauss-curvature", abs(K[0] + 1.0), cfg.tol)
    annulus = ParamGrid((-5.0, 5.0), (0.0, 2 * np.pi), 256, 64, kind="log")
    total = total_curvature(data, annulus)
    report.data["total_curvature"] = total
    expected = -4 * np.pi * np.tanh(5.0)
    report.check("total_curvature", "total-curvature", abs(total / expected - 1.0), 1e-4)
    _shiffman_field(report, cfg, "catenoid")


def diagnose_riemann(report: Report, cfg) -> None:
    lam = parameter_of(cfg.surface, 1.0)
    data, params = make_riemann(lam)
    report.data["riemann"] = params.as_dict()
    _jorge_meeks(report, data, genus=1, ends=2)
    report.check("period_residual", "period-closure", params.residual, cfg.tol)
    normalized, _, _ = normalize_flux(data)
    F = flux(normalized, normalized.cycle("horizontal"), "horizontal", tol=cfg.quad_tol)
    report.data["flux"] = F.as_dict()
    report.check("horizontal_flux", "flux-vector", F.F[0], 1e-6, upper=False)

    cylinder = resolve(cfg.surface, gauge="dz")
    total = total_curvature(cylinder, surface_grid(cylinder, "riemann", cfg.ns, cfg.nt))
    report.data["total_curvature"] = total
    report.check("total_curvature", "total-curvature", abs(total / (-8 * np.pi) - 1.0), CURVATURE_REL_TOL)
    fit = end_fit(end_samples(cylinder, "riemann", 0, 0.0))
    report.data["end_fit"] = fit.as_dict()
    report.check("middle_end_fit", "planar-middle-end", abs(fit.a), MIDDLE_END_TOL)
    _shiffman_field(report, cfg, "riemann")


def diagnose_plane(report: Report, cfg) -> None:
    data = resolve("plane")
    _jorge_meeks(report, data, genus=0, ends=1)
    square = mesh(data, ParamGrid((-2.0, 2.0), (-2.0, 2.0), 400, 400), workers=cfg.threads)
    profile = ball_area_profile(square, (0.0, 0.0, 0.0), [0.5, 1.0, 1.5, 2.0])
    report.data["ball_area_profile"] = profile
    gap = max(abs(ratio - np.pi) for _, ratio in profile)
    report.check("monotonicity", "monotonicity", gap, PLANE_DENSITY_TOL)
    _superharmonic(report, data, "plane")
    report.check("curvature", "gauss-curvature", float(np.max(np.abs(square.curvature))), cfg.tol)


def diagnose_other(report: Report, cfg, family: str) -> None:
    data = resolve(cfg.surface)
    _jorge_meeks(report, data, genus=0, ends=len(data.ends))
    if family == "helicoid":
        _superharmonic(report, data, "helicoid")
    region = surface_grid(data, family, cfg.ns, cfg.nt)
    report.data["total_curvature"] = total_curvature(data, region)
    if data.cycles:
        report.data["period_residual"] = period_report(data).as_dict()
    _shiffman_field(report, cfg, family)


@click.command("diagnose")
@click.argument("surface", required=False)
@click.option("--ns", type=int)
@click.option("--nt", type=int)
@click.option("--tol", type=float, help="Tolerancia de las comprobaciones.")
@click.option("--output-dir", type=click.Path(file_okay=False))
@click.pass_context
@validate_with(RunConfig)
@audit("diagnose")
@metrics
def diagnose_command(ctx, **options):
    """Ejecuta las comprobaciones globales y escribe <superficie>.diagnose.json."""
    cfg = ctx.obj["run_config"]
    family = family_of(cfg.surface)
    report = Report(command="diagnose", surface=cfg.surface)
    if family == "catenoid":
        diagnose_catenoid(report, cfg)
    elif family == "riemann":
        diagnose_riemann(report, cfg)
    elif family == "plane":
        diagnose_plane(report, cfg)
    else:
        diagnose_other(report, cfg, family)
    logger.info("DIAGNOSTICO: %d comprobaciones en '%s'", len(report.checks), cfg.surface)
    emit(ctx, report, output_path(cfg, f"{surface_stem(cfg.surface)}.diagnose.json"))


@click.command("fit-end")
@click.argument("surface", required=False)
@click.option("--end", "end_index", type=int, default=0, show_default=True, help="Índice del fin.")
@click.option("--radius", type=float, default=100.0, show_default=True, help="Radio R del anillo [R, 4R].")
@click.option("--output-dir", type=click.Path(file_okay=False))
@click.pass_context
@validate_with(RunConfig)
@audit("fit-end")
def fit_end_command(ctx, end_index, radius, **options):
    """Ajusta la altura de un fin y escribe <superficie>.end<i>.json."""
    cfg = ctx.obj["run_config"]
    family = family_of(cfg.surface)
    data = resolve(cfg.surface, gauge="dz" if family == "riemann" else "chart")
    if not 0 <= end_index < len(data.ends):
        raise click.BadParameter(f"'{data.name}' tiene {len(data.ends)} fines", param_hint="--end")
    samples = end_samples(data, family, end_index, radius)
    fit = end_fit(samples, R=radius if family == "catenoid" else None)
    report = Report(command="fit-end", surface=cfg.surface)
    report.data.update(end=end_index, fit=fit.as_dict())
    click.echo(f"a = {fit.a:.6g}, b = {fit.b:.6g}, rms = {fit.rms:.3g}")
    emit(ctx, report, output_path(cfg, f"{surface_stem(cfg.surface)}.end{end_index}.json"))
