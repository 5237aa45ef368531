# -*- coding: utf-8 -*-
"""
Esquemas de Pydantic para la configuración y los informes del laboratorio.

`RunConfig` valida la configuración combinada (valores por defecto, fichero
TOML y opciones de la línea de comandos) a través del aspecto
`@validate_with`. `Report` y `CheckResult` dan forma al informe JSON de los
comandos, con un identificador `anchor` por comprobación.
"""
from pydantic import BaseModel, Field, field_validator

from wlab.export import SCHEMA_VERSION


class RunConfig(BaseModel):
    """
    Configuración validada de un comando.

    Atributos:
        surface (str): nombre de catálogo, p. ej. "riemann:λ=1".
        ns, nt (int): celdas de la malla en cada dirección.
        line_samples (int): muestras por línea vertical; potencia de dos.
        tol (float): tolerancia de las comprobaciones.
        quad_tol (float): tolerancia de las cuadraturas.
        horizon (float): horizonte T de los flujos.
        step (float): paso inicial de los flujos.
        gauge (float): γ = i·gauge en el flujo de Shiffman.
        n_max (int): último flujo de la prueba algebro-geométrica.
        output_dir (str): carpeta de salida.
        seed (int): semilla de las perturbaciones aleatorias.
        threads (int): hilos de mallado (WLAB_THREADS).
    """

    surface: str = "catenoid"
    ns: int = Field(64, ge=4, le=4096)
    nt: int = Field(64, ge=4, le=4096)
    line_samples: int = Field(64, ge=8, le=8192)
    tol: float = Field(1e-8, gt=0, description="La tolerancia debe ser positiva.")
    quad_tol: float = Field(1e-11, gt=0)
    horizon: float = Field(0.05, ge=0, le=0.1, description="Horizonte corto de los flujos complejos.")
    step: float = Field(1e-3, gt=0)
    gauge: float = 0.5
    n_max: int = Field(3, ge=1, le=5)
    output_dir: str = "out"
    seed: int = 0
    threads: int = Field(1, ge=1, le=256)

    @field_validator("line_samples")
    @classmethod
    def power_of_two(cls, value: int) -> int:
        if value & (value - 1):
            raise ValueError("debe ser potencia de dos")
        return value


class CheckResult(BaseModel):
    """Resultado de una comprobación numérica: valor frente a tolerancia."""

    name: str
    anchor: str
    value: float
    tol: float
    passed: bool


class Report(BaseModel):
    schema_version: str = SCHEMA_VERSION
    command: str
    surface: str
    checks: list[CheckResult] = []
    data: dict = {}

    def check(self, name: str, anchor: str, value: float, tol: float, upper: bool = True) -> CheckResult:
        """
        Registra una comprobación; pasa si value ≤ tol (o ≥ tol con upper=False).
        """
        value = float(value)
        passed = value <= tol if upper else value >= tol
        result = CheckResult(name=name, anchor=anchor, value=value, tol=tol, passed=passed)
        self.checks.append(result)
        return result

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]
