# -*- coding: utf-8 -*-
"""
Gestión de la configuración del laboratorio.

La configuración se construye por capas: valores por defecto, fichero TOML
de instancia (`wlab.toml` o `--config`), mapeo de pruebas y, por último, las
opciones de cada comando. Incluye el comando `init-config`, que escribe un
fichero TOML comentado con los valores por defecto.
"""
import logging
import os
import tomllib
from pathlib import Path

import click

logger = logging.getLogger(__name__)

INSTANCE_FILE = "wlab.toml"

DEFAULTS = {
    "surface": "catenoid",
    "ns": 64,
    "nt": 64,
    "line_samples": 64,
    "tol": 1e-8,
    "quad_tol": 1e-11,
    "horizon": 0.05,
    "step": 1e-3,
    "gauge": 0.5,
    "n_max": 3,
    "output_dir": "out",
    "seed": 0,
    "threads": 1,
}

_COMMENTS = {
    "surface": "plane, catenoid, helicoid, riemann:λ=<v>, perturbed:ε=<v>",
    "line_samples": "potencia de dos",
    "horizon": "horizonte de los flujos complejos, |t| ≤ 0.1",
    "gauge": "γ = i·gauge en el flujo de Shiffman",
}


def load_file(path) -> dict:
    """Lee un fichero TOML; acepta la tabla [wlab] o claves en la raíz."""
    with open(path, "rb") as f:
        data = tomllib.load(f)
    return dict(data.get("wlab", data))


def build_config(config_path=None, test_config=None) -> dict:
    """
    Combina DEFAULTS, el fichero de instancia y el mapeo de pruebas.

    Sin `test_config` se intenta cargar `config_path` o, si no se da,
    `wlab.toml` en el directorio de trabajo (si existe).
    """
    config = dict(DEFAULTS)
    if test_config is None:
        path = Path(config_path) if config_path else Path(INSTANCE_FILE)
        if path.is_file():
            config.update(load_file(path))
            logger.debug("CONFIG: cargado '%s'", path)
        elif config_path:
            raise click.BadParameter(f"no existe el fichero '{path}'", param_hint="--config")
    else:
        config.update(test_config)
    env_threads = os.environ.get("WLAB_THREADS")
    if env_threads:
        config["threads"] = int(env_threads)
    return config


def default_toml() -> str:
    lines = ["[wlab]"]
    for key, value in DEFAULTS.items():
        if key in _COMMENTS:
            lines.append(f"# {_COMMENTS[key]}")
        if isinstance(value, str):
            lines.append(f'{key} = "{value}"')
        else:
            lines.append(f"{key} = {value!r}")
    return "\n".join(lines) + "\n"


@click.command("init-config")
@click.argument("path", default=INSTANCE_FILE, type=click.Path(dir_okay=False))
def init_config_command(path):
    """
    Comando de CLI para escribir un fichero de configuración por defecto.

    Se ejecuta con `wlab init-config [ruta]`.
    """
    Path(path).write_text(default_toml(), encoding="utf-8")
    click.echo(f"Configuración inicializada en '{path}'.")


def init_cli(cli):
    """Registra los comandos de configuración en el grupo raíz."""
    cli.add_command(init_config_command)
