# -*- coding: utf-8 -*-
"""
Catálogo de superficies: plano, catenoide, helicoide y ejemplos de Riemann.

Los ejemplos de Riemann se construyen de dos formas:
    make_riemann: sobre la cubierta doble de w² = z(z-λ)(λz+1), con g = z y
        dh = A_λ dz/w, resolviendo A_λ para cerrar los periodos.
    make_riemann_cylinder: en la carta cilíndrica ℂ/⟨i⟩ con dh = dz, donde g
        se expresa con funciones elípticas de Jacobi.

Nombres de la CLI: plane, catenoid, helicoid, riemann:λ=<v>, perturbed:ε=<v>.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass

import numpy as np
from scipy import special

from wlab.aop import cache
from wlab.complexkit import AnalyticFn, Contour, contour_integrate
from wlab.errors import NotDzNormalized, PeriodSolveFailed, ZeroVerticalFlux
from wlab.weierstrass import (
    Chart,
    ChartKind,
    End,
    EndKind,
    WeierstrassData,
    flux,
    period_report,
    similarity,
    weierstrass_form,
)

logger = logging.getLogger(__name__)

LAMBDA_RANGE = (0.05, 20.0)


def _const(value, name):
    return AnalyticFn.constant(value, name)


def make_plane() -> WeierstrassData:
    """(g, dh) = (1, dz) en ℂ."""
    return WeierstrassData(
        g=_const(1.0, "1"),
        phi=_const(1.0, "1"),
        chart=Chart(ChartKind.PLANE),
        ends=(End(0j, EndKind.PLANAR, at_infinity=True),),
        derivatives=(_const(0.0, "0"),) * 3,
        name="plane",
    )


def make_catenoid() -> WeierstrassData:
    """(g, dh) = (z, dz/z) en ℂ∖{0}; |z| = 1 es la circunferencia cintura."""
    g = AnalyticFn(lambda z: z, ((0j, 1),), "z")
    phi = AnalyticFn(lambda z: 1.0 / z, ((0j, -1),), "1/z")
    return WeierstrassData(
        g=g,
        phi=phi,
        chart=Chart(ChartKind.PUNCTURED_PLANE),
        base_point=1 + 0j,
        base_position=(-1.0, 0.0, 0.0),
        ends=(
            End(0j, EndKind.CATENOIDAL, loop=Contour.circle(0j, 0.5)),
            End(0j, EndKind.CATENOIDAL, at_infinity=True, loop=Contour.circle(0j, 2.0, orientation=-1)),
        ),
        derivatives=(_const(1.0, "1"), _const(0.0, "0"), _const(0.0, "0")),
        cycles=(("horizontal", Contour.circle(0j, 1.0)),),
        name="catenoid",
    )


def make_helicoid() -> WeierstrassData:
    """(g, dh) = (e^z, i dz) en ℂ."""
    exp = AnalyticFn(np.exp, (), "e^z")
    return WeierstrassData(
        g=exp,
        phi=_const(1j, "i"),
        chart=Chart(ChartKind.PLANE),
        ends=(End(0j, EndKind.HELICOIDAL, at_infinity=True),),
        derivatives=(exp, exp, exp),
        name="helicoid",
    )


def make_catenoid_cylinder() -> WeierstrassData:
    """Catenoide en su recubrimiento universal: (g, dh) = (e^z, dz), periodo 2πi."""
    exp = AnalyticFn(np.exp, (), "e^z")
    return WeierstrassData(
        g=exp,
        phi=_const(1.0, "1"),
        chart=Chart(ChartKind.CYLINDER, period=2j * np.pi),
        base_position=(-1.0, 0.0, 0.0),
        derivatives=(exp, exp, exp),
        cycles=(("horizontal", Contour.vertical_loop(0.0, period=2 * np.pi)),),
        name="catenoid-dz",
    )


def make_helicoid_dz() -> WeierstrassData:
    """Helicoide en la normalización dh = dz: g = e^{-iz}."""
    g = AnalyticFn(lambda z: np.exp(-1j * z), (), "e^(-iz)")
    d1 = AnalyticFn(lambda z: -1j * np.exp(-1j * z), (), "g'")
    d2 = AnalyticFn(lambda z: -np.exp(-1j * z), (), "g''")
    d3 = AnalyticFn(lambda z: 1j * np.exp(-1j * z), (), "g'''")
    return WeierstrassData(
        g=g,
        phi=_const(1.0, "1"),
        chart=Chart(ChartKind.CYLINDER, period=2 * np.pi + 0j),
        ends=(End(0j, EndKind.HELICOIDAL, at_infinity=True),),
        derivatives=(d1, d2, d3),
        name="helicoid-dz",
    )


def make_perturbed(eps: float = 0.1) -> WeierstrassData:
    """
    Dato de prueba no circular g = exp(z + ε sin(2πiz)) con dh = dz.

    g no es periódico en y, pero |g|, g'/g y g''/g sí lo son, y con ellos
    todas las magnitudes de la capa de Shiffman.
    """
    two_pi_i = 2j * np.pi

    def q(z):
        return z + eps * np.sin(two_pi_i * z)

    def q1(z):
        return 1 + two_pi_i * eps * np.cos(two_pi_i * z)

    def q2(z):
        return 4 * np.pi**2 * eps * np.sin(two_pi_i * z)

    def q3(z):
        return 8j * np.pi**3 * eps * np.cos(two_pi_i * z)

    g = AnalyticFn(lambda z: np.exp(q(z)), (), f"perturbed({eps:g})")
    d1 = AnalyticFn(lambda z: np.exp(q(z)) * q1(z), (), "g'")
    d2 = AnalyticFn(lambda z: np.exp(q(z)) * (q2(z) + q1(z) ** 2), (), "g''")
    d3 = AnalyticFn(
        lambda z: np.exp(q(z)) * (q3(z) + 3 * q1(z) * q2(z) + q1(z) ** 3), (), "g'''"
    )
    return WeierstrassData(
        g=g,
        phi=_const(1.0, "1"),
        chart=Chart(ChartKind.CYLINDER, period=1j),
        derivatives=(d1, d2, d3),
        cycles=(("horizontal", Contour.vertical_loop(0.0)),),
        name=f"perturbed:ε={eps:g}",
    )


# --- Ejemplos de Riemann ---


def jacobi_complex(u, m: float):
    """sn, cn, dn de Jacobi con argumento complejo por la fórmula de adición."""
    u = np.asarray(u, dtype=complex)
    s, c, d, _ = special.ellipj(u.real, m)
    s1, c1, d1, _ = special.ellipj(u.imag, 1.0 - m)
    den = c1**2 + m * s**2 * s1**2
    with np.errstate(divide="ignore", invalid="ignore"):
        sn = (s * d1 + 1j * c * d * s1 * c1) / den
        cn = (c * c1 - 1j * s * d * s1 * d1) / den
        dn = (d * c1 * d1 - 1j * m * s * c * s1) / den
    return sn, cn, dn


@dataclass(frozen=True)
class CylinderConstants:
    lam: float
    m: float
    K: float
    Kp: float

    @property
    def period(self) -> float:
        """Periodo real K/K' de g en la carta cilíndrica."""
        return self.K / self.Kp

    @property
    def c0(self) -> float:
        return 16.0 * self.Kp**2 / (1.0 + self.lam**2)

    def zero(self, j: int = 0) -> complex:
        return complex((2 * j + 1) * self.period / 2)

    def pole(self, j: int = 0) -> complex:
        return complex(j * self.period, 0.5)


def cylinder_constants(lam: float) -> CylinderConstants:
    m = 1.0 / (1.0 + lam**2)
    return CylinderConstants(lam, m, float(special.ellipk(m)), float(special.ellipk(1.0 - m)))


def _check_lambda(lam: float) -> None:
    if lam <= 0:
        raise ValueError("λ debe ser positivo")
    if not LAMBDA_RANGE[0] <= lam <= LAMBDA_RANGE[1]:
        logger.warning("CATALOGO: λ=%g fuera del rango soportado %s", lam, LAMBDA_RANGE)


def make_riemann_cylinder(lam: float) -> WeierstrassData:
    """
    Ejemplo de Riemann M_λ en la carta ℂ/⟨i⟩ con dh = dz.

    g(z) = -cn²(2K'z | m)/λ con m = 1/(1+λ²). g tiene ceros dobles en
    p_j = (2j+1)K/(2K') y polos dobles en q_j = jK/K' + i/2; son los fines
    planos. Las derivadas salen de (g')² = c₀(λg³ + (1-λ²)g² - λg).
    """
    _check_lambda(lam)
    cc = cylinder_constants(lam)
    scale = 2.0 * cc.Kp

    def g_eval(z):
        _, cn, _ = jacobi_complex(scale * np.asarray(z, dtype=complex), cc.m)
        return -(cn**2) / lam

    def d1_eval(z):
        sn, cn, dn = jacobi_complex(scale * np.asarray(z, dtype=complex), cc.m)
        return (4.0 * cc.Kp / lam) * cn * sn * dn

    def d2_eval(z):
        g = g_eval(z)
        return 0.5 * cc.c0 * (3 * lam * g**2 + 2 * (1 - lam**2) * g - lam)

    def d3_eval(z):
        g = g_eval(z)
        return 0.5 * cc.c0 * (6 * lam * g + 2 * (1 - lam**2)) * d1_eval(z)

    sing = []
    for j in (-1, 0, 1):
        for k in (-1, 0, 1):
            sing.append((cc.zero(j) + 1j * k, 2))
            sing.append((cc.pole(j) + 1j * k, -2))
    sing = tuple(sing)
    poles = tuple(s for s in sing if s[1] < 0)
    rho = 0.25 * min(cc.period, 1.0)
    g = AnalyticFn(g_eval, sing, f"riemann-g({lam:g})")
    return WeierstrassData(
        g=g,
        phi=_const(1.0, "1"),
        chart=Chart(ChartKind.CYLINDER, period=1j, lam=lam),
        base_point=complex(cc.period / 4),
        ends=(
            End(cc.zero(0), EndKind.PLANAR, loop=Contour.circle(cc.zero(0), rho)),
            End(cc.pole(0), EndKind.PLANAR, loop=Contour.circle(cc.pole(0), rho)),
        ),
        derivatives=(
            AnalyticFn(d1_eval, poles, "g'"),
            AnalyticFn(d2_eval, poles, "g''"),
            AnalyticFn(d3_eval, poles, "g'''"),
        ),
        cycles=(("horizontal", Contour.vertical_loop(cc.period / 4)),),
        name=f"riemann-dz:λ={lam:g}",
    )


def cylinder_homology(lam: float, height: float = 0.25, n: int = 64) -> tuple:
    """
    Generadores del toro ℂ/⟨P, i⟩ en la carta dz: el lazo vertical Re z = P/4
    y el horizontal Im z = height, ambos lejos de ceros y polos de g.
    """
    period = cylinder_constants(lam).period
    return (
        Contour.vertical_loop(period / 4, n=n),
        Contour.horizontal_loop(height, period, n=n),
    )


def cylinder_translation(data: WeierstrassData, height: float = 0.25) -> np.ndarray:
    """Periodo T_λ en ℝ³: Re ∫ Φ a lo largo de un periodo real a la altura Im z = height."""
    if not data.chart.lam:
        raise ValueError("la traslación solo se define para el ejemplo de Riemann cilíndrico")
    _, path = cylinder_homology(data.chart.lam, height)
    return np.real(contour_integrate(weierstrass_form(data), path, tol=1e-11))


def elliptic_branch(lam: float):
    """w₁(z) = √λ·z·√(1-λ/z)·√(z+1/λ), con cortes [0, λ] y (-∞, -1/λ]."""
    root = np.sqrt(lam)

    def w1(z):
        z = np.asarray(z, dtype=complex)
        return root * z * np.sqrt(1.0 - lam / z) * np.sqrt(z + 1.0 / lam)

    return w1


def homology_basis(lam: float, n: int = 128) -> tuple:
    """
    Ciclos a y b sobre la cubierta doble.

    a rodea el corte [0, λ] en la hoja 1 (sección horizontal compacta). b
    cruza cada corte una vez y cambia de hoja en cada cruce.
    """
    a = Contour.circle(lam / 2, lam / 2 + 1 / (2 * lam), n)
    center, radius = -1 / (2 * lam), 1 / (2 * lam) + lam / 2
    theta = 2 * np.pi * np.arange(n + 1) / n
    pts = center + radius * np.exp(1j * theta)
    pts[-1] = pts[0]
    sheets = np.where(np.arange(n) < n // 2, 1.0, -1.0)
    b = Contour(pts, closed=True, sheets=sheets)
    return a, b


def _double_lap(center, radius, start, direction, n=96):
    theta = start + direction * 4 * np.pi * np.arange(2 * n + 1) / (2 * n)
    pts = center + radius * np.exp(1j * theta)
    pts[-1] = pts[0]
    sheets = np.where(np.arange(2 * n) < n, 1.0, -1.0)
    return Contour(pts, closed=True, sheets=sheets)


@dataclass(frozen=True, eq=False)
class RiemannExampleParams:
    lam: float
    A: complex
    branch: str
    branch_points: tuple
    branch_cuts: tuple
    T: np.ndarray
    a_cycle: Contour
    b_cycle: Contour
    residual: float

    def as_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "A": [self.A.real, self.A.imag],
            "branch": self.branch,
            "branch_points": [str(p) for p in self.branch_points],
            "branch_cuts": list(self.branch_cuts),
            "T": [float(v) for v in self.T],
            "period_residual": self.residual,
        }


def _elliptic_data(lam: float, A: complex) -> WeierstrassData:
    w1 = elliptic_branch(lam)
    a, b = homology_basis(lam)
    small = 0.25 * min(lam, 1 / lam)
    big = 4.0 * max(lam, 1 / lam)
    branch = ((0j, -1), (complex(lam), -1), (complex(-1 / lam), -1))
    return WeierstrassData(
        g=AnalyticFn(lambda z: z, ((0j, 1),), "z"),
        phi=AnalyticFn(lambda z: A / w1(z), branch, f"A/w(λ={lam:g})"),
        chart=Chart(ChartKind.ELLIPTIC_DOUBLE_COVER, lam=lam),
        base_point=complex(lam / 2, lam / 2 + 1 / (2 * lam)),
        ends=(
            End(0j, EndKind.PLANAR, loop=_double_lap(0j, small, 0.0, 1)),
            End(0j, EndKind.PLANAR, at_infinity=True, loop=_double_lap(0j, big, np.pi, -1)),
        ),
        derivatives=(_const(1.0, "1"), _const(0.0, "0"), _const(0.0, "0")),
        cycles=(("horizontal", a),),
        name=f"riemann:λ={lam:g}",
    )


@cache(ttl=3600)
def make_riemann(lam: float, tol: float = 1e-8):
    """
    Ejemplo de Riemann M_λ sobre la curva elíptica w² = z(z-λ)(λz+1).

    A_λ se busca primero real y luego imaginario puro, imponiendo flujo
    vertical 1 sobre el ciclo a; se acepta la rama cuyo informe de periodos
    (ciclo a y lazos de los fines) tenga residuo < tol.

    Returns:
        tuple: (WeierstrassData, RiemannExampleParams)

    Raises:
        PeriodSolveFailed: si ninguna rama cierra los periodos.
    """
    _check_lambda(lam)
    w1 = elliptic_branch(lam)
    a, b = homology_basis(lam)
    base = AnalyticFn(lambda z: 1.0 / w1(z), ((0j, -1), (complex(lam), -1), (complex(-1 / lam), -1)))
    integral = contour_integrate(base, a, tol=1e-13)
    for branch, unit, slope in (("real", 1.0, integral.imag), ("imaginary", 1j, integral.real)):
        if slope <= 0:
            continue
        # el flujo vertical es lineal en A
        A = unit / float(slope)
        data = _elliptic_data(lam, A)
        residual = period_report(data).residual
        logger.info("PERIODOS: λ=%g rama %s A=%s residuo %.3e", lam, branch, A, residual)
        if residual < tol:
            T = np.real(contour_integrate(weierstrass_form(data), b, tol=1e-11))
            params = RiemannExampleParams(
                lam=lam,
                A=complex(A),
                branch=branch,
                branch_points=(0.0, lam, -1 / lam, "inf"),
                branch_cuts=(f"[0, {lam:g}]", f"(-inf, {-1 / lam:g}]"),
                T=T,
                a_cycle=a,
                b_cycle=b,
                residual=residual,
            )
            return data, params
    raise PeriodSolveFailed(f"ninguna rama de A_λ cierra los periodos para λ={lam:g}")


def normalize_flux(data: WeierstrassData, cycle: Contour | None = None):
    """
    Homotecia y giro alrededor de x₃ para que el flujo sea (h, 0, 1) con h ≥ 0.

    Returns:
        tuple: (datos normalizados, escala, giro)
    """
    cycle = data.cycle("horizontal") if cycle is None else cycle
    F = flux(data, cycle).F
    if abs(F[2]) < 1e-12:
        raise ZeroVerticalFlux(f"flujo vertical nulo en '{data.name}'")
    scale = 1.0 / F[2]
    horizontal = complex(F[0], F[1]) * scale
    rotation = -float(np.angle(horizontal)) if abs(horizontal) > 1e-14 else 0.0
    if scale == 1.0 and rotation == 0.0:
        return data, 1.0, 0.0
    return similarity(data, scale, rotation), float(scale), rotation


# --- Nombres de la CLI ---

_NAME = re.compile(r"^(?P<family>[a-z-]+)(?::(?P<key>λ|lambda|ε|eps)=(?P<value>[-+0-9.eE]+))?$")


def resolve(name: str, gauge: str = "chart") -> WeierstrassData:
    """
    Construye la superficie de un nombre de la CLI.

    Args:
        name (str): plane, catenoid, helicoid, riemann:λ=<v>, perturbed:ε=<v>.
        gauge (str): "chart" para la carta natural, "dz" para la normalización
            dh = dz que exige la capa de Shiffman.
    """
    match = _NAME.match(name.strip())
    if match is None:
        raise ValueError(f"nombre de superficie desconocido: '{name}'")
    family, value = match.group("family"), match.group("value")
    param = float(value) if value is not None else None
    if family == "plane":
        return make_plane()
    if family == "catenoid":
        return make_catenoid_cylinder() if gauge == "dz" else make_catenoid()
    if family == "helicoid":
        return make_helicoid_dz() if gauge == "dz" else make_helicoid()
    if family == "riemann":
        lam = 1.0 if param is None else param
        return make_riemann_cylinder(lam) if gauge == "dz" else make_riemann(lam)[0]
    if family == "perturbed":
        return make_perturbed(0.1 if param is None else param)
    raise ValueError(f"familia desconocida: '{family}'")


def require_dz(data: WeierstrassData) -> WeierstrassData:
    """Rechaza datos fuera de la carta dh = dz."""
    z = np.array([0.1 + 0.2j, 0.3 + 0.4j]) + data.base_point
    if not np.allclose(data.phi(z), 1.0):
        raise NotDzNormalized(
            f"'{data.name}' no está en la normalización dh = dz; use resolve(..., gauge='dz')"
        )
    return data
