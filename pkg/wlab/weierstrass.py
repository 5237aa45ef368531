# -*- coding: utf-8 -*-
"""
Geometría a partir de un par de Weierstrass (g, dh).

Dada la aplicación de Gauss estereográfica g y la forma de altura
dh = phi·dz en una carta, este módulo construye la inmersión
X = Re ∫ (½(1/g - g), (i/2)(1/g + g), 1) phi dz, su métrica y curvatura,
mallas de la superficie, vectores de flujo, informes de periodos, el ajuste
asintótico de fines y las comprobaciones numéricas de monotonía y
superarmonicidad.

Tipos:
    Chart, End, WeierstrassData, ParamGrid, SurfaceMesh, FluxVector,
    PeriodReport, EndFit.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
from scipy import spatial

from wlab.complexkit import (
    AnalyticFn,
    Contour,
    cauchy_derivative,
    contour_integrate,
    count_zeros_poles,
)
from wlab.errors import (
    NonIntegerDegree,
    NotAGraph,
    NotApplicable,
    SingularPoint,
    ZeroOnPath,
)

logger = logging.getLogger(__name__)

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)
_GL_NODES = 0.5 * (_GL_NODES + 1.0)
_GL_WEIGHTS = 0.5 * _GL_WEIGHTS


class ChartKind(str, Enum):
    PLANE = "plane"
    PUNCTURED_PLANE = "punctured_plane"
    CYLINDER = "cylinder"
    ELLIPTIC_DOUBLE_COVER = "elliptic_double_cover"


class EndKind(str, Enum):
    PLANAR = "planar"
    CATENOIDAL = "catenoidal"
    HELICOIDAL = "helicoidal"


@dataclass(frozen=True)
class Chart:
    """Carta única donde viven los datos; `period` para cilindros, `lam` para la curva elíptica."""

    kind: ChartKind
    period: complex = 0j
    lam: float | None = None


@dataclass(frozen=True, eq=False)
class End:
    """Fin declarado: posición en la carta, tipo y lazo opcional que lo rodea."""

    location: complex
    kind: EndKind
    at_infinity: bool = False
    loop: Contour | None = None


@dataclass(frozen=True, eq=False)
class WeierstrassData:
    """
    Datos de Weierstrass de una superficie mínima.

    Atributos:
        g (AnalyticFn): aplicación de Gauss estereográfica.
        phi (AnalyticFn): densidad de dh en la coordenada de la carta.
        chart (Chart): carta de definición.
        base_point (complex): punto base p₀ de la integración.
        base_position (tuple): X(p₀) en ℝ³.
        ends (tuple[End]): fines declarados.
        derivatives (tuple[AnalyticFn]): g', g'', g''' analíticas, si se conocen.
        cycles (tuple): pares (etiqueta, Contour) de la base de ciclos estándar.
        name (str): nombre en catálogo.
    """

    g: AnalyticFn
    phi: AnalyticFn
    chart: Chart
    base_point: complex = 0j
    base_position: tuple = (0.0, 0.0, 0.0)
    ends: tuple = ()
    derivatives: tuple = ()
    cycles: tuple = ()
    name: str = "surface"

    def dg(self, n: int = 1, r: float = 0.02) -> AnalyticFn:
        """g^(n) analítica si se declaró, si no por la fórmula de Cauchy."""
        if n == 0:
            return self.g
        if len(self.derivatives) >= n:
            return self.derivatives[n - 1]
        g = self.g
        return AnalyticFn(
            lambda z: cauchy_derivative(g, z, n, r),
            g.singularities,
            f"{g.name}^({n})",
        )

    def singular_points(self) -> tuple:
        return tuple(self.g.singularities) + tuple(self.phi.singularities)

    def cycle(self, tag: str) -> Contour:
        for name, contour in self.cycles:
            if name == tag:
                return contour
        raise KeyError(f"'{self.name}' no declara el ciclo '{tag}'")

    def evolve(self, **changes) -> "WeierstrassData":
        return replace(self, **changes)


def weierstrass_form(data: WeierstrassData) -> AnalyticFn:
    """El integrando vectorial (Φ₁, Φ₂, Φ₃) de la representación."""
    g_fn, phi_fn = data.g, data.phi

    def evaluator(z):
        g = g_fn(z)
        phi = phi_fn(z)
        return np.stack(
            [0.5 * (1.0 / g - g) * phi, 0.5j * (1.0 / g + g) * phi, phi * np.ones_like(g)],
            axis=-1,
        )

    return AnalyticFn(evaluator, data.singular_points(), f"Phi[{data.name}]")


def _horizontal_form(data: WeierstrassData) -> AnalyticFn:
    full = weierstrass_form(data)
    return AnalyticFn(lambda z: full(z)[..., :2], full.singularities, full.name)


def default_path(data: WeierstrassData, target: complex) -> Contour | None:
    """Camino en L desde p₀: primero horizontal, luego vertical."""
    p0 = complex(data.base_point)
    target = complex(target)
    points = [p0]
    for p in (complex(target.real, p0.imag), target):
        if p != points[-1]:
            points.append(p)
    if len(points) == 1:
        return None
    return Contour.polyline(points)


def immerse(data: WeierstrassData, target: complex, path: Contour | None = None, tol: float = 1e-11):
    """
    Posición X(target) integrando la representación a lo largo de `path`.

    Args:
        data (WeierstrassData): datos de la superficie.
        target (complex): punto de la carta.
        path (Contour, optional): camino desde p₀; por defecto en L.

    Returns:
        np.ndarray: punto de ℝ³.
    """
    base = np.asarray(data.base_position, dtype=float)
    if path is None:
        path = default_path(data, target)
        if path is None:
            return base.copy()
    if abs(path.samples[0] - data.base_point) > 1e-9:
        raise ValueError("el camino debe empezar en el punto base")
    if abs(path.samples[-1] - target) > 1e-9:
        raise ValueError("el camino debe terminar en el punto pedido")
    value = contour_integrate(weierstrass_form(data), path, tol=tol)
    return base + np.real(value)


def metric_curvature(data: WeierstrassData, at):
    """
    Factor conforme Λ, curvatura de Gauss K y normal unitaria N.

    Returns:
        tuple: (Λ, K, N) con la forma de `at` (N con un eje final de 3).

    Raises:
        SingularPoint: cero o polo de g, o cero de phi.
    """
    z = np.asarray(at, dtype=complex)
    g = data.g(z)
    phi = data.phi(z)
    if np.any(~np.isfinite(g)) or np.any(np.abs(g) == 0) or np.any(np.abs(phi) == 0):
        raise SingularPoint(f"punto singular de '{data.name}' en la carta")
    lam, curv, normal = _metric_arrays(data, z, g, phi)
    if np.any(~np.isfinite(lam)) or np.any(lam <= 0):
        raise SingularPoint(f"métrica degenerada de '{data.name}'")
    return lam, curv, normal


def gauss_map(g):
    """N = (2 Re g, 2 Im g, |g|² - 1)/(|g|² + 1)."""
    g = np.asarray(g, dtype=complex)
    mod2 = np.abs(g) ** 2
    return np.stack([2 * g.real, 2 * g.imag, mod2 - 1.0], axis=-1) / (mod2 + 1.0)[..., None]


def normal_derivative(g, dg):
    """∂_z N = g'(1 - ḡ², -i(1 + ḡ²), 2ḡ)/(1 + |g|²)²."""
    g = np.asarray(g, dtype=complex)
    gb = np.conj(g)
    scale = np.asarray(dg, dtype=complex) / (1.0 + np.abs(g) ** 2) ** 2
    return np.stack([1 - gb**2, -1j * (1 + gb**2), 2 * gb], axis=-1) * scale[..., None]


def gauss_density(data: WeierstrassData, z) -> np.ndarray:
    """K·Λ² = -4|g'|²/(1+|g|²)², densidad de área esférica cambiada de signo."""
    g = data.g(z)
    dg = data.dg(1)(z)
    return -4.0 * np.abs(dg) ** 2 / (1.0 + np.abs(g) ** 2) ** 2


def _metric_arrays(data, z, g=None, phi=None):
    g = data.g(z) if g is None else g
    phi = data.phi(z) if phi is None else phi
    mod = np.abs(g)
    lam = 0.5 * (mod + 1.0 / mod) * np.abs(phi)
    dg = data.dg(1)(z)
    curv = -((2.0 * np.abs(dg)) / ((1.0 + mod**2) * lam)) ** 2
    return lam, curv, gauss_map(g)


# --- Mallas ---


@dataclass(frozen=True)
class ParamGrid:
    """
    Rejilla conforme w = s + i t llevada a la carta por z = F(w).

    `kind` = "rect": z = w. `kind` = "log": z = center + e^w (anillos y
    entornos polares de un punto).
    """

    s_range: tuple
    t_range: tuple
    ns: int
    nt: int
    kind: str = "rect"
    center: complex = 0j

    @property
    def ds(self) -> float:
        return (self.s_range[1] - self.s_range[0]) / self.ns

    @property
    def dt(self) -> float:
        return (self.t_range[1] - self.t_range[0]) / self.nt

    def vertices(self) -> np.ndarray:
        s = np.linspace(self.s_range[0], self.s_range[1], self.ns + 1)
        t = np.linspace(self.t_range[0], self.t_range[1], self.nt + 1)
        return s[:, None] + 1j * t[None, :]

    def centers(self) -> np.ndarray:
        s = self.s_range[0] + (np.arange(self.ns) + 0.5) * self.ds
        t = self.t_range[0] + (np.arange(self.nt) + 0.5) * self.dt
        return s[:, None] + 1j * t[None, :]

    def to_chart(self, w):
        w = np.asarray(w, dtype=complex)
        return w if self.kind == "rect" else self.center + np.exp(w)

    def jacobian(self, w):
        w = np.asarray(w, dtype=complex)
        return np.ones_like(w) if self.kind == "rect" else np.exp(w)

    def from_chart(self, z: complex) -> complex:
        z = complex(z)
        return z if self.kind == "rect" else complex(np.log(z - self.center))


@dataclass(frozen=True, eq=False)
class SurfaceMesh:
    """Malla de vértices (ns+1)×(nt+1) con posición, normal, Λ y K por vértice."""

    grid: ParamGrid
    domain: np.ndarray
    positions: np.ndarray
    normals: np.ndarray
    conformal: np.ndarray
    curvature: np.ndarray

    @property
    def shape(self) -> tuple:
        return self.domain.shape

    def faces(self) -> np.ndarray:
        ns, nt = self.shape[0] - 1, self.shape[1] - 1
        i, j = np.meshgrid(np.arange(ns), np.arange(nt), indexing="ij")
        v00 = (i * (nt + 1) + j).ravel()
        return np.stack([v00, v00 + nt + 1, v00 + nt + 2, v00 + 1], axis=1)

    def flat(self, name: str) -> np.ndarray:
        arr = getattr(self, name)
        return arr.reshape(-1, arr.shape[-1]) if arr.ndim == 3 else arr.ravel()

    def face_areas(self) -> np.ndarray:
        p = self.positions
        a, b, c, d = p[:-1, :-1], p[1:, :-1], p[1:, 1:], p[:-1, 1:]
        tri1 = 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=-1)
        tri2 = 0.5 * np.linalg.norm(np.cross(c - a, d - a), axis=-1)
        return tri1 + tri2


def _segment_integrals(form, grid, w0, w1, substeps):
    """∫ Φ(F(w)) F'(w) dw sobre los segmentos w0→w1 (arrays de igual forma)."""
    w0 = np.asarray(w0, dtype=complex)
    dw = (np.asarray(w1, dtype=complex) - w0) / substeps
    total = np.zeros(w0.shape + (3,), dtype=complex)
    for q in range(substeps):
        for x, wt in zip(_GL_NODES, _GL_WEIGHTS):
            w = w0 + dw * (q + x)
            total += wt * form(grid.to_chart(w)) * (grid.jacobian(w) * dw)[..., None]
    return total


def _path_integral(form, grid, points, pieces=64):
    acc = np.zeros(3, dtype=complex)
    for a, b in zip(points[:-1], points[1:]):
        if a != b:
            acc += _segment_integrals(form, grid, np.array(a), np.array(b), pieces)
    return acc


def mesh(data: WeierstrassData, grid: ParamGrid, substeps: int = 2, workers: int = 1) -> SurfaceMesh:
    """
    Malla de la superficie sobre `grid`.

    La posición del primer vértice se obtiene integrando desde p₀ por un
    camino en L en el plano w (primero vertical, luego horizontal); el resto
    se acumula arista a arista con Gauss-Legendre de 8 nodos.
    """
    form = weierstrass_form(data)
    W = grid.vertices()
    Z = grid.to_chart(W)
    wb = grid.from_chart(data.base_point)
    corner = complex(wb.real, W[0, 0].imag)
    start = np.asarray(data.base_position, dtype=float) + np.real(
        _path_integral(form, grid, [wb, corner, complex(W[0, 0])])
    )
    column = np.real(_segment_integrals(form, grid, W[0, :-1], W[0, 1:], substeps))
    first = start + np.concatenate([np.zeros((1, 3)), np.cumsum(column, axis=0)])

    def rows(cols):
        return np.real(_segment_integrals(form, grid, W[:-1, cols], W[1:, cols], substeps))

    nt1 = W.shape[1]
    if workers > 1:
        chunks = np.array_split(np.arange(nt1), workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(rows, chunks))
        steps = np.concatenate(parts, axis=1)
    else:
        steps = rows(np.arange(nt1))
    positions = first[None, :, :] + np.concatenate(
        [np.zeros((1, nt1, 3)), np.cumsum(steps, axis=0)]
    )
    lam, curv, normal = _metric_arrays(data, Z)
    logger.debug("MALLA: %s con %d vértices", data.name, Z.size)
    return SurfaceMesh(grid, Z, positions, normal, lam, curv)


def total_curvature(data: WeierstrassData, region) -> float:
    """
    ∫K dA por la regla del punto medio en cada cara de la rejilla.

    Args:
        region (ParamGrid | SurfaceMesh): región de integración.
    """
    grid = region.grid if isinstance(region, SurfaceMesh) else region
    wc = grid.centers()
    z = grid.to_chart(wc)
    density = gauss_density(data, z) * np.abs(grid.jacobian(wc)) ** 2
    return float(np.sum(density) * grid.ds * grid.dt)


# --- Flujo y periodos ---


@dataclass(frozen=True, eq=False)
class FluxVector:
    F: np.ndarray
    contour: Contour
    tag: str = ""

    def as_dict(self) -> dict:
        return {"tag": self.tag, "F": [float(v) for v in self.F]}


def flux(data: WeierstrassData, c: Contour, tag: str = "", tol: float = 1e-12) -> FluxVector:
    """F = Im ∮ Φ; la componente vertical se integra aparte para que solo dependa de dh."""
    if not c.closed:
        raise ValueError("el flujo se calcula sobre contornos cerrados")
    horizontal = contour_integrate(_horizontal_form(data), c, tol=tol)
    vertical = contour_integrate(data.phi, c, tol=tol)
    F = np.array([horizontal[0].imag, horizontal[1].imag, vertical.imag])
    return FluxVector(F, c, tag)


@dataclass
class CyclePeriods:
    tag: str
    dh_over_g: complex
    g_dh: complex
    dh: complex

    @property
    def deviation(self) -> float:
        return max(abs(np.conj(self.g_dh) - self.dh_over_g), abs(self.dh.real))

    def as_dict(self) -> dict:
        return {
            "tag": self.tag,
            "dh_over_g": [self.dh_over_g.real, self.dh_over_g.imag],
            "g_dh": [self.g_dh.real, self.g_dh.imag],
            "re_dh": self.dh.real,
            "deviation": self.deviation,
        }


@dataclass
class PeriodReport:
    """Integrales por ciclo, residuos por fin y residuo total de cierre."""

    cycles: list = field(default_factory=list)
    ends: list = field(default_factory=list)

    @property
    def residual(self) -> float:
        devs = [c.deviation for c in self.cycles] + [e.deviation for e in self.ends]
        return float(max(devs, default=0.0))

    def as_dict(self) -> dict:
        return {
            "cycles": [c.as_dict() for c in self.cycles],
            "ends": [
                dict(e.as_dict(), residue_dh_over_g=_pair(e.dh_over_g / (2j * np.pi)),
                     residue_g_dh=_pair(e.g_dh / (2j * np.pi)))
                for e in self.ends
            ],
            "residual": self.residual,
        }


def _pair(value: complex) -> list:
    return [float(np.real(value)), float(np.imag(value))]


def _cycle_periods(data, tag, c, tol):
    g, phi = data.g, data.phi
    sing = data.singular_points()
    a = AnalyticFn(lambda z: phi(z) / g(z), sing, "dh/g")
    b = AnalyticFn(lambda z: g(z) * phi(z), sing, "g dh")
    return CyclePeriods(
        tag,
        complex(contour_integrate(a, c, tol=tol)),
        complex(contour_integrate(b, c, tol=tol)),
        complex(contour_integrate(phi, c, tol=tol)),
    )


def end_loop(data: WeierstrassData, end: End) -> Contour | None:
    """Lazo alrededor de un fin: el declarado o un círculo pequeño en cartas univaluadas."""
    if end.loop is not None:
        return end.loop
    if data.chart.kind == ChartKind.ELLIPTIC_DOUBLE_COVER:
        return None
    locs = np.array([complex(s[0]) for s in data.singular_points()], dtype=complex)
    if end.at_infinity:
        radius = 2.0 * float(np.max(np.abs(locs), initial=0.0)) + 2.0
        return Contour.circle(0j, radius, orientation=-1)
    dist = np.abs(locs - end.location)
    dist = dist[dist > 1e-12]
    radius = min(0.5, 0.5 * float(np.min(dist))) if dist.size else 0.5
    return Contour.circle(end.location, radius)


def period_report(data: WeierstrassData, cycles=None, tol: float = 1e-12) -> PeriodReport:
    """
    Condiciones de cierre conj(∮ g dh) = ∮ dh/g y Re ∮ dh = 0 por ciclo y por fin.
    """
    cycles = data.cycles if cycles is None else cycles
    report = PeriodReport()
    for item in cycles:
        tag, c = item if isinstance(item, tuple) else ("", item)
        report.cycles.append(_cycle_periods(data, tag, c, tol))
    for k, end in enumerate(data.ends):
        loop = end_loop(data, end)
        if loop is None:
            continue
        report.ends.append(_cycle_periods(data, f"end{k}:{end.kind.value}", loop, tol))
    logger.info("PERIODOS: '%s' residuo %.3e", data.name, report.residual)
    return report


# --- Deformaciones ---


def _scaled(fn: AnalyticFn, factor: complex, name: str) -> AnalyticFn:
    return AnalyticFn(lambda z: factor * fn(z), fn.singularities, name)


def lopez_ros(data: WeierstrassData, lam: float) -> WeierstrassData:
    """Deformación (λg, dh); dh queda intacta."""
    if lam <= 0:
        raise ValueError("λ debe ser positivo")
    if lam == 1:
        return data
    return data.evolve(
        g=_scaled(data.g, lam, f"{lam}*{data.g.name}"),
        derivatives=tuple(_scaled(d, lam, d.name) for d in data.derivatives),
        name=f"{data.name}|lopez_ros({lam:g})",
    )


def associate(data: WeierstrassData, theta: float) -> WeierstrassData:
    """Superficie asociada (g, e^{iθ} dh); θ = π/2 es la conjugada."""
    if theta == 0:
        return data
    rot = np.exp(1j * theta)
    return data.evolve(
        phi=_scaled(data.phi, rot, f"e^(i{theta:g})*{data.phi.name}"),
        name=f"{data.name}|associate({theta:g})",
    )


def similarity(data: WeierstrassData, scale: float, rotation: float) -> WeierstrassData:
    """Homotecia de razón `scale` seguida de un giro `rotation` alrededor del eje x₃."""
    rot = np.exp(1j * rotation)
    x = np.asarray(data.base_position, dtype=float) * scale
    xy = rot * complex(x[0], x[1])
    return data.evolve(
        g=_scaled(data.g, rot, data.g.name),
        phi=_scaled(data.phi, scale, data.phi.name),
        derivatives=tuple(_scaled(d, rot, d.name) for d in data.derivatives),
        base_position=(xy.real, xy.imag, x[2]),
    )


# --- Fines y comprobaciones globales ---


@dataclass
class EndFit:
    a: float
    b: float
    c1: float
    c2: float
    rms: float
    samples: int

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("a", "b", "c1", "c2", "rms", "samples")}


def end_fit(samples, R: float | None = None, jump: float = 0.5) -> EndFit:
    """
    Ajuste x₃ = a log r + b + (c₁x₁ + c₂x₂)/r² por mínimos cuadrados.

    Args:
        samples (SurfaceMesh | array (M, 3)): puntos del fin.
        R (float, optional): si se da, solo se usa el anillo r ∈ [R, 4R].
        jump (float): salto vertical entre vecinos que delata dos hojas.

    Raises:
        NotAGraph: si la proyección vertical no es inyectiva.
    """
    pts = samples.flat("positions") if isinstance(samples, SurfaceMesh) else np.asarray(samples, float)
    pts = pts[np.all(np.isfinite(pts), axis=1)]
    r = np.hypot(pts[:, 0], pts[:, 1])
    if R is not None:
        keep = (r >= R) & (r <= 4 * R)
        pts, r = pts[keep], r[keep]
    if pts.shape[0] < 8:
        raise ValueError("muy pocas muestras en el anillo de ajuste")
    tree = spatial.cKDTree(pts[:, :2])
    _, idx = tree.query(pts[:, :2], k=2)
    gaps = np.abs(pts[idx[:, 1], 2] - pts[:, 2])
    if np.max(gaps) > jump:
        raise NotAGraph(f"salto vertical {np.max(gaps):.3g} entre vecinos horizontales")
    design = np.stack([np.log(r), np.ones_like(r), pts[:, 0] / r**2, pts[:, 1] / r**2], axis=1)
    coef, *_ = np.linalg.lstsq(design, pts[:, 2], rcond=None)
    rms = float(np.sqrt(np.mean((design @ coef - pts[:, 2]) ** 2)))
    return EndFit(*(float(c) for c in coef), rms, int(pts.shape[0]))


def ball_area_profile(mesh_: SurfaceMesh, center, radii) -> list:
    """A(R)/R² con recorte por fracción de vértices dentro de la bola."""
    c = np.asarray(center, dtype=float)
    areas = mesh_.face_areas()
    dist = np.linalg.norm(mesh_.positions - c, axis=-1)
    out = []
    for R in radii:
        inside = (dist <= R).astype(float)
        frac = 0.25 * (inside[:-1, :-1] + inside[1:, :-1] + inside[1:, 1:] + inside[:-1, 1:])
        out.append((float(R), float(np.sum(areas * frac)) / R**2))
    return out


def _laplacian_w(f, ds, dt):
    """f_ss + f_tt con diferencias centradas de cuarto orden en el interior."""
    c = f[2:-2, 2:-2]
    fss = (-f[4:, 2:-2] + 16 * f[3:-1, 2:-2] - 30 * c + 16 * f[1:-3, 2:-2] - f[:-4, 2:-2]) / (12 * ds**2)
    ftt = (-f[2:-2, 4:] + 16 * f[2:-2, 3:-1] - 30 * c + 16 * f[2:-2, 1:-3] - f[2:-2, :-4]) / (12 * dt**2)
    return fss + ftt


@dataclass
class SuperharmonicReport:
    max_laplacian: float
    max_collin_gap: float

    @property
    def violation(self) -> float:
        return max(self.max_laplacian, self.max_collin_gap)

    def as_dict(self) -> dict:
        return {
            "max_laplacian": self.max_laplacian,
            "max_collin_gap": self.max_collin_gap,
            "violation": self.violation,
        }


def superharmonic_check(data: WeierstrassData, region: SurfaceMesh) -> SuperharmonicReport:
    """
    Δf para f = ln r - x₃² y la desigualdad |Δ ln r| ≤ |∇x₃|²/r².

    El laplaciano es el conforme (4/Λ²)∂_z∂_z̄, discretizado en la rejilla.
    """
    grid = region.grid
    X = region.positions
    r = np.hypot(X[..., 0], X[..., 1])
    if np.any(r < 1e-9):
        raise ValueError("la región toca el eje x₃")
    log_r = np.log(r)
    f = log_r - X[..., 2] ** 2
    core = (slice(2, -2), slice(2, -2))
    metric = (region.conformal * np.abs(grid.jacobian(grid.vertices()))) ** 2
    lap_f = _laplacian_w(f, grid.ds, grid.dt) / metric[core]
    lap_log = _laplacian_w(log_r, grid.ds, grid.dt) / metric[core]
    grad_x3 = np.abs(data.phi(region.domain[core])) ** 2 / region.conformal[core] ** 2
    gap = np.abs(lap_log) - grad_x3 / r[core] ** 2
    return SuperharmonicReport(float(np.max(lap_f)), float(np.max(gap)))


def _polar_cells(radius: float, rings: int, sectors: int, offset: float, arc: int = 8):
    """Disco interior y sectores anulares que recubren |z| ≤ radius."""
    theta = offset + 2 * np.pi * np.arange(sectors * arc + 1) / (sectors * arc)
    r0 = radius / rings
    disc = r0 * np.exp(1j * theta)
    disc[-1] = disc[0]
    yield Contour(disc)
    for k in range(1, rings):
        inner, outer = k * r0, (k + 1) * r0
        radial = np.linspace(inner, outer, arc + 1)[1:-1]
        for s in range(sectors):
            t = theta[s * arc:(s + 1) * arc + 1]
            a, b = np.exp(1j * t[0]), np.exp(1j * t[-1])
            pts = np.concatenate([
                outer * np.exp(1j * t),
                radial[::-1] * b,
                inner * np.exp(1j * t[::-1]),
                radial * a,
                [outer * a],
            ])
            yield Contour(pts)


def _zero_count(fn, radius: float, rings: int, sectors: int, offset: float) -> int:
    """Ceros de fn en |z| ≤ radius: suma de vueltas positivas por celda."""
    return sum(max(count_zeros_poles(fn, cell), 0) for cell in _polar_cells(radius, rings, sectors, offset))


def gauss_degree(data: WeierstrassData, rings: int = 8, sectors: int = 16) -> int:
    """
    Grado de g contando sus ceros en toda la esfera de la carta.

    |z| ≤ R se recubre con celdas polares y |z| ≥ R con las mismas celdas en
    w = 1/z; cada celda aporta su número de vueltas si es positivo. En la
    cubierta elíptica doble g solo depende de z y el conteo se duplica.

    Raises:
        NotApplicable: cartas cilíndricas (infinitos fines en el cociente).
        NonIntegerDegree: ninguna malla de celdas evita los ceros de g.
    """
    kind = data.chart.kind
    if kind == ChartKind.CYLINDER:
        raise NotApplicable(f"'{data.name}' vive en un cilindro; el grado no es finito")
    locs = [complex(loc) for loc, _ in data.g.singularities]
    locs += [complex(e.location) for e in data.ends if not e.at_infinity]
    R = max(2.0, 2.0 * max((abs(z) for z in locs), default=0.0) + 1.0)
    g = data.g

    def at_infinity(w):
        return g(1.0 / np.asarray(w, dtype=complex))

    for offset, stretch in ((0.1, 1.0), (0.37, 1.07), (0.71, 1.13)):
        try:
            zeros = _zero_count(g, stretch * R, rings, sectors, offset)
            zeros += _zero_count(at_infinity, 1.0 / (stretch * R), rings, sectors, offset)
            break
        except ZeroOnPath:
            logger.debug("JORGE_MEEKS: celda sobre un cero de g, se desplaza la malla")
    else:
        raise NonIntegerDegree(f"no hay malla de celdas que evite los ceros de g en '{data.name}'")
    sheets = 2 if kind == ChartKind.ELLIPTIC_DOUBLE_COVER else 1
    return sheets * zeros


def jorge_meeks_check(data: WeierstrassData, genus: int, ends: int) -> tuple:
    """
    deg(g) contado en toda la carta y deg(g) - (genus + ends - 1).

    Raises:
        NotApplicable: g constante, fines helicoidales o carta cilíndrica.
        NonIntegerDegree: el conteo de vueltas no es entero.
    """
    if not data.ends or any(e.kind == EndKind.HELICOIDAL for e in data.ends):
        raise NotApplicable(f"'{data.name}' no tiene curvatura total finita")
    degree = gauss_degree(data)
    if degree == 0:
        raise NotApplicable("la fórmula se enuncia para deg(g) ≥ 1")
    logger.info("JORGE_MEEKS: '%s' grado %d", data.name, degree)
    return degree, degree - (genus + ends - 1)
