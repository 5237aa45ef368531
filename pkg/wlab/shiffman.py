# -*- coding: utf-8 -*-
"""
Capa de funciones de Jacobi sobre la carta cilíndrica con dh = dz.

Contenido:
    - planar_curvature: curvatura de las secciones horizontales.
    - shiffman: función de Shiffman S.
    - jacobi_residual: residuo del operador de Jacobi con plantillas de orden 4.
    - HFunction, gdot, f_of_h: la correspondencia h ↦ (ġ(h), f(h)).
    - montiel_ros: inmersión ramificada asociada a un campo de Jacobi.
    - tangent_check, kernel_flux_check: divisor y periodos de un ġ candidato.
    - linear_part_fit, min_pole_spacing: informes auxiliares.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from wlab.catalog import require_dz
from wlab.complexkit import (
    AnalyticFn,
    Contour,
    SampledLine,
    cauchy_derivative,
    contour_integrate,
    count_zeros_poles,
    spectral_derivative,
)
from wlab.errors import BranchPointOnGrid, SingularityOnLevel, SingularityOnLine
from wlab.weierstrass import WeierstrassData, gauss_map, normal_derivative

logger = logging.getLogger(__name__)

LINE_GUARD = 1e-3


class FieldKind(str, Enum):
    REAL = "real"
    COMPLEXIFIED = "complexified"


@dataclass(frozen=True, eq=False)
class JacobiField:
    """Muestras de un campo de Jacobi sobre una línea o una franja de la carta."""

    values: np.ndarray
    z: np.ndarray
    kind: FieldKind = FieldKind.REAL

    def __post_init__(self):
        vals = np.asarray(self.values)
        if not np.all(np.isfinite(vals)):
            raise ValueError("campo de Jacobi con muestras no finitas")
        if self.kind is FieldKind.REAL:
            if np.iscomplexobj(vals) and np.max(np.abs(vals.imag), initial=0.0) >= 1e-12:
                raise ValueError("un campo real no puede tener parte imaginaria")
            vals = np.real(vals).astype(float)
        object.__setattr__(self, "values", vals)

    @property
    def real(self) -> "JacobiField":
        return JacobiField(np.real(self.values), self.z, FieldKind.REAL)

    @property
    def imag(self) -> "JacobiField":
        return JacobiField(np.imag(self.values), self.z, FieldKind.REAL)

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True)
class StripGrid:
    """
    Franja de columnas Re z = x0 + k·hx, |k| ≤ half_width, con n muestras
    periódicas en y. Por defecto hx coincide con el paso en y.
    """

    x0: float
    n: int
    half_width: int = 2
    period: float = 1.0
    hx: float | None = None

    @property
    def hy(self) -> float:
        return self.period / self.n

    @property
    def h(self) -> float:
        return self.hy if self.hx is None else self.hx

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.h * np.arange(-self.half_width, self.half_width + 1)

    @property
    def y(self) -> np.ndarray:
        return self.period * np.arange(self.n) / self.n

    @property
    def z(self) -> np.ndarray:
        return self.x[:, None] + 1j * self.y[None, :]

    def refine(self) -> "StripGrid":
        hx = None if self.hx is None else self.hx / 2
        return StripGrid(self.x0, 2 * self.n, self.half_width, self.period, hx)


def _points(target) -> np.ndarray:
    if isinstance(target, SampledLine):
        return target.z
    if isinstance(target, StripGrid):
        return target.z
    return np.asarray(target, dtype=complex)


def _guard(data: WeierstrassData, z: np.ndarray, error, guard: float = LINE_GUARD) -> None:
    locs = [complex(loc) for loc, _ in data.g.singularities]
    for fn in data.derivatives:
        locs.extend(complex(loc) for loc, _ in fn.singularities)
    period = data.chart.period
    if period:
        locs = [loc + k * period for loc in locs for k in (-1, 0, 1)]
    if locs:
        dist = np.min(np.abs(z.reshape(-1, 1) - np.asarray(locs)[None, :]))
        if dist < guard:
            raise error(f"la malla pasa a {dist:.2e} de una singularidad de '{data.name}'")


def _jets(data: WeierstrassData, target, order: int, error=SingularityOnLine):
    """[g, g', ..., g^(order)] en los puntos de `target`."""
    z = _points(target)
    _guard(data, z, error)
    g = data.g(z)
    jets = [g]
    if len(data.derivatives) >= order:
        jets.extend(data.derivatives[k](z) for k in range(order))
    elif isinstance(target, SampledLine):
        line = target.with_values(g)
        for k in range(1, order + 1):
            jets.append(spectral_derivative(line, k).values)
    else:
        jets.extend(data.dg(k)(z) for k in range(1, order + 1))
    jets = [np.asarray(j, dtype=complex) for j in jets]
    if any(not np.all(np.isfinite(j)) for j in jets) or np.any(np.abs(g) == 0):
        raise error(f"valores no finitos de g o sus derivadas en '{data.name}'")
    return jets


def planar_curvature(data: WeierstrassData, c: float, y) -> np.ndarray:
    """
    κ_c(y) = [|g|/(1+|g|²)]·Re(g'/g) sobre la curva de nivel Re z = c.

    Raises:
        SingularityOnLevel: si la curva pasa por un cero o polo de g.
    """
    require_dz(data)
    z = c + 1j * np.asarray(y, dtype=float)
    g, g1 = _jets(data, z, 1, SingularityOnLevel)
    mod = np.abs(g)
    return mod / (1.0 + mod**2) * np.real(g1 / g)


def shiffman(data: WeierstrassData, target) -> JacobiField:
    """
    Función de Shiffman S = Im[(3/2)x² - g''/g - x²/(1+|g|²)], x = g'/g.

    Args:
        data (WeierstrassData): datos con dh = dz.
        target (SampledLine | StripGrid): dónde muestrear.
    """
    require_dz(data)
    g, g1, g2 = _jets(data, target, 2)
    x = g1 / g
    values = np.imag(1.5 * x**2 - g2 / g - x**2 / (1.0 + np.abs(g) ** 2))
    logger.debug("SHIFFMAN: sup|S| = %.3e en '%s'", np.max(np.abs(values)), data.name)
    return JacobiField(values, _points(target))


def jacobi_potential(data: WeierstrassData, z) -> np.ndarray:
    """2|g'|²/(1+|g|²)², el potencial del operador de Jacobi en la carta dz."""
    g, g1 = _jets(data, np.asarray(z, dtype=complex), 1)
    return 2.0 * np.abs(g1) ** 2 / (1.0 + np.abs(g) ** 2) ** 2


def _d2x(v, h):
    return (-v[:-4] + 16 * v[1:-3] - 30 * v[2:-2] + 16 * v[3:-1] - v[4:]) / (12 * h**2)


def _d2y(v, h):
    r = lambda k: np.roll(v, -k, axis=-1)  # noqa: E731
    return (-r(2) + 16 * r(1) - 30 * v + 16 * r(-1) - r(-2)) / (12 * h**2)


def _d1x(v, h):
    return (-v[4:] + 8 * v[3:-1] - 8 * v[1:-3] + v[:-4]) / (12 * h)


def jacobi_residual(data: WeierstrassData, v: JacobiField, grid: StripGrid) -> float:
    """
    max |v_zz̄ + 2|g'|²/(1+|g|²)² v| en las columnas interiores de la franja.

    v_zz̄ = Δv/4 con diferencias centradas de cuarto orden; la dirección y es
    periódica.
    """
    vals = np.asarray(v.values)
    if vals.shape != grid.z.shape:
        raise ValueError("el campo no está muestreado sobre la franja")
    if grid.half_width < 2:
        raise ValueError("se necesitan dos columnas a cada lado")
    lap = _d2x(vals, grid.h) + _d2y(vals, grid.hy)[2:-2]
    z = grid.z[2:-2]
    residual = 0.25 * lap + jacobi_potential(data, z) * vals[2:-2]
    return float(np.max(np.abs(residual)))


# --- Correspondencia h ↦ (ġ, f) ---


class HKind(str, Enum):
    USER = "user"
    H_S = "h_S"
    ONE_OVER_G = "one_over_g"
    C1_PLUS_C2_OVER_G2 = "c1_plus_c2_over_g2"


@dataclass(frozen=True)
class HFunction:
    """
    Función meromorfa h expresada a partir de g y sus derivadas.

    `d1` y `d2` son h' y h'' analíticas; si faltan se usan derivadas de
    Cauchy.
    """

    evaluator: AnalyticFn
    provenance: HKind = HKind.USER
    d1: AnalyticFn | None = None
    d2: AnalyticFn | None = None

    def __call__(self, z):
        return self.evaluator(z)

    def derivative(self, n: int) -> AnalyticFn:
        declared = {1: self.d1, 2: self.d2}.get(n)
        if declared is not None:
            return declared
        fn = self.evaluator
        return AnalyticFn(lambda z: cauchy_derivative(fn, z, n, r=0.01), fn.singularities)

    def __add__(self, other: "HFunction") -> "HFunction":
        if not isinstance(other, HFunction):
            return NotImplemented
        a, b = self.evaluator, other.evaluator
        sing = tuple(a.singularities) + tuple(b.singularities)
        a1, b1 = self.derivative(1), other.derivative(1)
        a2, b2 = self.derivative(2), other.derivative(2)
        return HFunction(
            AnalyticFn(lambda z: a(z) + b(z), sing, f"{a.name}+{b.name}"),
            HKind.USER,
            AnalyticFn(lambda z: a1(z) + b1(z), sing),
            AnalyticFn(lambda z: a2(z) + b2(z), sing),
        )


def _sing(data: WeierstrassData) -> tuple:
    return tuple(data.g.singularities)


def h_user(fn) -> HFunction:
    if not isinstance(fn, AnalyticFn):
        fn = AnalyticFn(fn)
    return HFunction(fn, HKind.USER)


def h_one_over_g(data: WeierstrassData) -> HFunction:
    g, g1, g2 = data.g, data.dg(1), data.dg(2)
    s = _sing(data)
    return HFunction(
        AnalyticFn(lambda z: 1.0 / g(z), s, "1/g"),
        HKind.ONE_OVER_G,
        AnalyticFn(lambda z: -g1(z) / g(z) ** 2, s),
        AnalyticFn(lambda z: -g2(z) / g(z) ** 2 + 2 * g1(z) ** 2 / g(z) ** 3, s),
    )


def h_c1_plus_c2_over_g2(data: WeierstrassData, c1: complex, c2: complex) -> HFunction:
    g, g1, g2 = data.g, data.dg(1), data.dg(2)
    s = _sing(data)
    return HFunction(
        AnalyticFn(lambda z: c1 + c2 / g(z) ** 2, s, "c1+c2/g^2"),
        HKind.C1_PLUS_C2_OVER_G2,
        AnalyticFn(lambda z: -2 * c2 * g1(z) / g(z) ** 3, s),
        AnalyticFn(lambda z: -2 * c2 * g2(z) / g(z) ** 3 + 6 * c2 * g1(z) ** 2 / g(z) ** 4, s),
    )


def h_shiffman(data: WeierstrassData) -> HFunction:
    """h_S = (i/2)(g')²/g³, cuya f es la función de Shiffman complejificada."""
    g, g1, g2, g3 = data.g, data.dg(1), data.dg(2), data.dg(3)
    s = _sing(data)

    def d1(z):
        G, G1, G2 = g(z), g1(z), g2(z)
        return 0.5j * (2 * G1 * G2 / G**3 - 3 * G1**3 / G**4)

    def d2(z):
        G, G1, G2, G3 = g(z), g1(z), g2(z), g3(z)
        return 0.5j * (
            2 * G2**2 / G**3 + 2 * G1 * G3 / G**3 - 15 * G1**2 * G2 / G**4 + 12 * G1**4 / G**5
        )

    return HFunction(
        AnalyticFn(lambda z: 0.5j * g1(z) ** 2 / g(z) ** 3, s, "h_S"),
        HKind.H_S,
        AnalyticFn(d1, s),
        AnalyticFn(d2, s),
    )


def gdot(h: HFunction, data: WeierstrassData) -> AnalyticFn:
    """ġ(h) = ((g³h')/(2g'))', desarrollado con h'' y g''."""
    g, g1, g2 = data.g, data.dg(1), data.dg(2)
    h1, h2 = h.derivative(1), h.derivative(2)

    def evaluator(z):
        G, G1, G2 = g(z), g1(z), g2(z)
        H1, H2 = h1(z), h2(z)
        return (3 * G**2 * G1 * H1 + G**3 * H2) / (2 * G1) - G**3 * H1 * G2 / (2 * G1**2)

    sing = tuple(data.g.singularities) + tuple(h.evaluator.singularities)
    return AnalyticFn(evaluator, sing, f"gdot({h.evaluator.name})")


def gdot_shiffman(data: WeierstrassData) -> AnalyticFn:
    """Forma cerrada ġ_S = (i/2)(g''' - 3g'g''/g + (3/2)(g')³/g²)."""
    g, g1, g2, g3 = data.g, data.dg(1), data.dg(2), data.dg(3)

    def evaluator(z):
        G, G1 = g(z), g1(z)
        return 0.5j * (g3(z) - 3 * G1 * g2(z) / G + 1.5 * G1**3 / G**2)

    return AnalyticFn(evaluator, tuple(data.g.singularities), "gdot_S")


def f_of_h(h: HFunction, data: WeierstrassData, target) -> JacobiField:
    """
    f(h) = g²h'/g' + 2gh/(1+|g|²), campo de Jacobi complejificado.

    Raises:
        SingularityOnLine: si la malla toca ceros o polos de g, o ceros de g'.
    """
    z = _points(target)
    g, g1 = _jets(data, target, 1)
    if np.min(np.abs(g1)) < 1e-12:
        raise SingularityOnLine("la malla pasa por un cero de g'")
    values = g**2 * h.derivative(1)(z) / g1 + 2 * g * h(z) / (1.0 + np.abs(g) ** 2)
    return JacobiField(values, z, FieldKind.COMPLEXIFIED)


def complexified_shiffman(data: WeierstrassData, target) -> JacobiField:
    """S + iS* como f(h_S); su parte real reproduce shiffman()."""
    require_dz(data)
    return f_of_h(h_shiffman(data), data, target)


# --- Montiel-Ros ---


def _dy_spectral(vals: np.ndarray, grid: StripGrid) -> np.ndarray:
    """∂_y por filas; spectral_derivative devuelve ∂_z = -i∂_y."""
    out = np.empty_like(vals, dtype=complex)
    for k, row in enumerate(vals):
        line = SampledLine(float(grid.x[k]), row, period=grid.period)
        out[k] = 1j * spectral_derivative(line, 1).values
    return out


def montiel_ros(v: JacobiField, data: WeierstrassData, grid: StripGrid) -> np.ndarray:
    """
    X_v = vN + (v_z N_z̄ + v_z̄ N_z)/|N_z|², con |N_z|² = 2|g'|²/(1+|g|²)².

    ∂_x por diferencias de cuarto orden, ∂_y espectral. Devuelve X_v en las
    columnas interiores, con un eje final de 3.

    Raises:
        BranchPointOnGrid: si g' se anula en la malla.
    """
    vals = np.asarray(v.values)
    if vals.shape != grid.z.shape:
        raise ValueError("el campo no está muestreado sobre la franja")
    z = grid.z[2:-2]
    g, g1 = _jets(data, z, 1)
    if np.min(np.abs(g1)) < 1e-10:
        raise BranchPointOnGrid("g' se anula en la malla")
    vx = _d1x(vals, grid.h)
    vy = _dy_spectral(vals, grid)[2:-2]
    vz = 0.5 * (vx - 1j * vy)
    vzb = 0.5 * (vx + 1j * vy)
    normal = gauss_map(g)
    nz = normal_derivative(g, g1)
    nz2 = 2 * np.abs(g1) ** 2 / (1 + np.abs(g) ** 2) ** 2
    center = vals[2:-2]
    X = center[..., None] * normal + (vz[..., None] * np.conj(nz) + vzb[..., None] * nz) / nz2[..., None]
    if v.kind is FieldKind.REAL:
        X = np.real(X)
    return X


def spread(points: np.ndarray) -> float:
    """Máxima distancia de las muestras a su media."""
    pts = np.asarray(points).reshape(-1, 3)
    return float(np.max(np.linalg.norm(pts - pts.mean(axis=0), axis=1)))


# --- Divisores y periodos ---


@dataclass(frozen=True)
class EndOrder:
    location: complex
    role: str
    order: int
    bound: int

    @property
    def passed(self) -> bool:
        return self.order >= self.bound


@dataclass(frozen=True)
class TangentReport:
    orders: tuple

    @property
    def passed(self) -> bool:
        return all(o.passed for o in self.orders)

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "orders": [
                {"location": [o.location.real, o.location.imag], "role": o.role, "order": o.order}
                for o in self.orders
            ],
        }


def tangent_check(candidate: AnalyticFn, data: WeierstrassData) -> TangentReport:
    """
    Comprueba (f) ≥ ∏ p_j q_j^{-3}: orden ≥ 1 en los ceros p_j de g y ≥ -3 en
    los polos q_j, contando con el principio del argumento en el lazo de cada
    fin declarado.
    """
    orders = []
    for end in data.ends:
        if end.at_infinity or end.loop is None:
            continue
        g_order = count_zeros_poles(data.g, end.loop)
        role, bound = ("p", 1) if g_order > 0 else ("q", -3)
        order = count_zeros_poles(candidate, end.loop)
        orders.append(EndOrder(complex(end.location), role, order, bound))
    report = TangentReport(tuple(orders))
    logger.info("TANGENTE: '%s' en '%s' -> %s", candidate.name, data.name, report.passed)
    return report


def kernel_flux_check(gdot_fn: AnalyticFn, data: WeierstrassData, gamma: Contour, tol: float = 1e-12):
    """
    (∮ ġ/g² dz, ∮ ġ dz) a lo largo de Γ; ambos nulos si ġ conserva los periodos.
    """
    g = data.g
    sing = tuple(gdot_fn.singularities) + tuple(g.singularities)
    over_g2 = AnalyticFn(lambda z: gdot_fn(z) / g(z) ** 2, sing)
    c1 = complex(contour_integrate(over_g2, gamma, tol=tol))
    c2 = complex(contour_integrate(gdot_fn.with_singularities(sing), gamma, tol=tol))
    logger.info("FLUJO_NUCLEO: c1=%.3e c2=%.3e", abs(c1), abs(c2))
    return c1, c2


@dataclass(frozen=True)
class LinearFit:
    a: np.ndarray
    c: float
    rms: float

    def as_dict(self) -> dict:
        return {"a": [float(x) for x in self.a], "c": self.c, "rms": self.rms}


def linear_part_fit(v: JacobiField, data: WeierstrassData) -> LinearFit:
    """Ajuste por mínimos cuadrados v ≈ ⟨N, a⟩ + c."""
    z = np.asarray(v.z).ravel()
    normal = gauss_map(data.g(z))
    design = np.column_stack([normal, np.ones(z.size)])
    rhs = np.real(np.asarray(v.values)).ravel()
    coeffs, *_ = np.linalg.lstsq(design, rhs, rcond=None)
    rms = float(np.sqrt(np.mean((design @ coeffs - rhs) ** 2)))
    return LinearFit(coeffs[:3], float(coeffs[3]), rms)


def min_pole_spacing(data: WeierstrassData) -> float:
    """Menor distancia entre polos declarados de g, contando las copias periódicas."""
    poles = [complex(loc) for loc, order in data.g.singularities if order < 0]
    period = data.chart.period
    if period:
        poles = [p + k * period for p in poles for k in (-1, 0, 1)]
    poles = np.unique(np.round(np.asarray(poles), 12))
    if poles.size < 2:
        return float("inf")
    diff = np.abs(poles[:, None] - poles[None, :])
    return float(np.min(diff[diff > 1e-9]))
