# -*- coding: utf-8 -*-
"""
Comando `mesh`: malla de una superficie de catálogo.

Escribe <superficie>.obj, <superficie>.ply y <superficie>.json con el flujo
de los ciclos declarados, la curvatura total de la región mallada y el
residuo de cierre de periodos.
"""
import click

from wlab.aop import audit, metrics, validate_with
from wlab.catalog import cylinder_translation, make_riemann, resolve
from wlab.export import write_obj, write_ply
from wlab.runner import emit, family_of, output_path, parameter_of, surface_grid, surface_stem
from wlab.schemas import Report, RunConfig
from wlab.weierstrass import flux, mesh, period_report, total_curvature


@click.command("mesh")
@click.argument("surface", required=False)
@click.option("--ns", type=int, help="Celdas en la primera dirección.")
@click.option("--nt", type=int, help="Celdas en la segunda dirección.")
@click.option("--tol", type=float, help="Tolerancia del residuo de periodos.")
@click.option("--output-dir", type=click.Path(file_okay=False))
@click.pass_context
@validate_with(RunConfig)
@audit("mesh")
@metrics
def mesh_command(ctx, **options):
    """Malla una superficie y escribe OBJ, PLY y metadatos JSON."""
    cfg = ctx.obj["run_config"]
    family = family_of(cfg.surface)
    # el ejemplo de Riemann se malla en la carta cilíndrica
    data = resolve(cfg.surface, gauge="dz" if family == "riemann" else "chart")
    surface_mesh = mesh(data, surface_grid(data, family, cfg.ns, cfg.nt), workers=cfg.threads)
    stem = surface_stem(cfg.surface)
    write_obj(surface_mesh, output_path(cfg, f"{stem}.obj"))
    write_ply(surface_mesh, output_path(cfg, f"{stem}.ply"))

    report = Report(command="mesh", surface=cfg.surface)
    report.data["fluxes"] = [
        flux(data, c, tag, tol=cfg.quad_tol).as_dict() for tag, c in data.cycles
    ]
    report.data["total_curvature"] = total_curvature(data, surface_mesh)
    report.data["vertices"] = int(surface_mesh.domain.size)
    if family == "riemann":
        _, params = make_riemann(parameter_of(cfg.surface, 1.0))
        report.data["riemann"] = params.as_dict()
        report.data["translation"] = [float(v) for v in cylinder_translation(data)]
        report.check("period_residual", "period-closure", params.residual, cfg.tol)
    elif family == "catenoid":
        report.check("period_residual", "period-closure", period_report(data).residual, cfg.tol)
    elif data.cycles:
        # el dato perturbado no cierra periodos: solo se informa
        report.data["period_residual"] = period_report(data).residual
    emit(ctx, report, output_path(cfg, f"{stem}.json"))
