# -*- coding: utf-8 -*-
"""
Módulo principal del laboratorio de superficies mínimas.

Este archivo contiene la fábrica de la CLI, `create_cli`, que configura el
grupo raíz de click y registra los comandos de cada sección (mesh, diagnose,
kdv, flow, fit-end, init-config).

Funciones:
    create_cli: La fábrica de la CLI.
    main: Punto de entrada del script `wlab`.
"""
import logging
import sys

import click

from wlab.errors import WlabError

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"


class WlabGroup(click.Group):
    """Grupo raíz que traduce `WlabError` a su código de salida."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except WlabError as e:
            logging.getLogger("wlab").error("%s: %s", type(e).__name__, e)
            click.echo(f"Error: {type(e).__name__}: {e}", err=True)
            raise click.exceptions.Exit(e.exit_code) from e


def create_cli(test_config=None):
    """
    Crea, configura y devuelve el grupo raíz de la CLI.

    La configuración se resuelve por capas: `DEFAULTS`, el fichero de
    instancia (`wlab.toml` o `--config`), `test_config` y, por último, las
    opciones de cada comando, que valida el aspecto `validate_with`.

    Args:
        test_config (dict, optional): mapeo de configuración para las pruebas,
            en lugar del fichero de instancia. Defaults to None.

    Returns:
        click.Group: el grupo raíz con todos los comandos registrados.
    """

    @click.group(cls=WlabGroup)
    @click.option("--config", "config_path", type=click.Path(dir_okay=False), help="Fichero TOML.")
    @click.option("-v", "--verbose", is_flag=True, help="Registro en nivel DEBUG.")
    @click.pass_context
    def cli(ctx, config_path, verbose):
        """Laboratorio numérico de superficies mínimas y flujos KdV."""
        logging.basicConfig(
            stream=sys.stderr,
            level=logging.DEBUG if verbose else logging.WARNING,
            format=LOG_FORMAT,
            force=True,
        )
        from wlab.config import build_config

        ctx.ensure_object(dict)
        ctx.obj["config"] = build_config(config_path, test_config)

    # Registrar la configuración y los comandos de cada sección
    from wlab import config

    config.init_cli(cli)

    from wlab.mesh import commands as mesh_commands

    cli.add_command(mesh_commands.mesh_command)

    from wlab.diagnose import commands as diagnose_commands

    cli.add_command(diagnose_commands.diagnose_command)
    cli.add_command(diagnose_commands.fit_end_command)

    from wlab.kdv import commands as kdv_commands

    cli.add_command(kdv_commands.kdv_group)
    cli.add_command(kdv_commands.flow_command)

    return cli


def main():
    create_cli()(prog_name="wlab")
