# -*- coding: utf-8 -*-
"""
Motor KdV: cambio de Miura, ecuación de Schrödinger, evolución espectral de
KdV real y del flujo de Shiffman sobre líneas del cilindro, seguimiento de
polos y prueba algebro-geométrica.

Convenios:
    u = -3(g')²/(4g²) + g''/(2g) = ½x' - ¼x², con x = g'/g.
    y = g^{-1/2}, que cumple y'' + u·y = 0.
    Flujo de Shiffman con factor γ (por defecto i/2):
        g_t = γ(g''' - 3g'g''/g + (3/2)(g')³/g²)
        u_t = γ(u''' + 6uu')
        y_t = -γ(u'y - 2uy')
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from wlab import diffpoly
from wlab.complexkit import SampledLine, cauchy_derivative, laurent_jet, spectral_derivative
from wlab.errors import (
    BlowupDetected,
    BranchObstruction,
    GaugeMismatch,
    NoConvergence,
    PoleCollision,
    TrackLost,
)
from wlab.shiffman import _jets
from wlab.weierstrass import WeierstrassData

logger = logging.getLogger(__name__)

SHIFFMAN_GAUGE = 0.5j
RANK_THRESHOLD = 1e-8


# --- Miura y Schrödinger ---


def _require_line(data: WeierstrassData, line: SampledLine):
    if line.antiperiodic:
        raise ValueError("g se muestrea sobre líneas periódicas")
    return _jets(data, line, 2)


def u_from_g(data: WeierstrassData, line: SampledLine) -> SampledLine:
    """u = -3(g')²/(4g²) + g''/(2g) sobre la línea."""
    g, g1, g2 = _require_line(data, line)
    return line.with_values(-0.75 * (g1 / g) ** 2 + 0.5 * g2 / g)


def miura_identity() -> bool:
    """Comprueba con sympy que u(g) coincide con ½x' - ¼x² para x = g'/g."""
    z = sp.symbols("z")
    g = sp.Function("g")(z)
    x = sp.diff(g, z) / g
    u = -sp.Rational(3, 4) * sp.diff(g, z) ** 2 / g**2 + sp.diff(g, z, 2) / (2 * g)
    return sp.simplify(u - (sp.diff(x, z) / 2 - x**2 / 4)) == 0


def miura_consistency(data: WeierstrassData, line: SampledLine) -> float:
    """max |u - (½x' - ¼x²)| con x' espectral."""
    g, g1, _ = _require_line(data, line)
    x = line.with_values(g1 / g)
    dx = spectral_derivative(x, 1).values
    u = u_from_g(data, line).values
    return float(np.max(np.abs(u - (0.5 * dx - 0.25 * x.values**2))))


def sqrt_branch(g: SampledLine) -> SampledLine:
    """
    Rama continua de y = g^{-1/2} a lo largo de la línea.

    Si g da un número impar de vueltas en un periodo, y es antiperiódica.

    Raises:
        BranchObstruction: si g no vuelve a su valor tras un periodo.
    """
    vals = g.values
    if np.any(np.abs(vals) == 0):
        raise BranchObstruction("g se anula sobre la línea")
    phase = np.unwrap(np.angle(np.append(vals, vals[0])))
    winding = (phase[-1] - phase[0]) / (2 * np.pi)
    if abs(winding - round(winding)) > 1e-6:
        raise BranchObstruction(f"g no es periódica en la línea (vueltas {winding:.4f})")
    winding = int(round(winding))
    y = np.exp(-0.5 * (np.log(np.abs(vals)) + 1j * phase[:-1]))
    if winding % 2:
        logger.info("SCHRODINGER: g da %d vueltas; se usa la rama antiperiódica", winding)
    return SampledLine(g.x0, y, antiperiodic=bool(winding % 2), period=g.period)


def schrodinger_check(data: WeierstrassData, line: SampledLine) -> float:
    """max |y'' + u·y| para y = g^{-1/2}, con derivadas espectrales."""
    g, _, _ = _require_line(data, line)
    y = sqrt_branch(line.with_values(g))
    u = u_from_g(data, line).values
    return float(np.max(np.abs(spectral_derivative(y, 2).values + u * y.values)))


# --- ETDRK4 ---


class ETDRK4:
    """
    Integrador exponencial de Runge-Kutta de orden 4 para u_t = L·u + N(u)
    en espacio de Fourier, con L diagonal.

    Los coeficientes se calculan como medias sobre un círculo de radio 1
    alrededor de cada h·L, lo que evita la cancelación cerca de cero. Se
    guardan por paso h.
    """

    def __init__(self, linear: np.ndarray, nonlinear, n_circ: int = 32):
        self.linear = np.asarray(linear, dtype=complex)
        self.nonlinear = nonlinear
        self.n_circ = n_circ
        self._coeffs = {}

    def coefficients(self, h: float):
        if h not in self._coeffs:
            circ = np.exp(2j * np.pi * (np.arange(1, self.n_circ + 1) - 0.5) / self.n_circ)
            lh = h * self.linear
            zc = lh[..., None] + circ
            ez = np.exp(zc)
            zeta = h * ((np.exp(zc / 2) - 1) / zc).mean(axis=-1)
            alpha = h * ((-4 - zc + ez * (4 - 3 * zc + zc**2)) / zc**3).mean(axis=-1)
            beta = h * ((2 + zc + ez * (zc - 2)) / zc**3).mean(axis=-1)
            gamma = h * ((-4 - 3 * zc - zc**2 + ez * (4 - zc)) / zc**3).mean(axis=-1)
            self._coeffs[h] = (np.exp(lh / 2), np.exp(lh), zeta, alpha, beta, gamma)
        return self._coeffs[h]

    def step(self, v: np.ndarray, h: float) -> np.ndarray:
        half, full, zeta, alpha, beta, gamma = self.coefficients(h)
        n1 = self.nonlinear(v)
        a = half * v + zeta * n1
        n2 = self.nonlinear(a)
        b = half * v + zeta * n2
        n3 = self.nonlinear(b)
        c = half * a + zeta * (2 * n3 - n1)
        n4 = self.nonlinear(c)
        return full * v + alpha * n1 + 2 * beta * (n2 + n3) + gamma * n4


# --- KdV real ---


def kdv_invariants(line: SampledLine) -> tuple:
    """(∮u, ∮u²) por trapecios sobre el periodo."""
    u = np.real(line.values)
    return float(np.mean(u) * line.period), float(np.mean(u**2) * line.period)


def kdv_real_evolve(u0: SampledLine, T: float, dt: float) -> SampledLine:
    """
    u_t = -u''' - 6uu' sobre el círculo de longitud `u0.period`, con la
    coordenada y de la línea como variable real.

    Raises:
        BlowupDetected: si max|u| supera 10³ veces el valor inicial.
    """
    if np.max(np.abs(np.imag(u0.values))) > 1e-12:
        raise ValueError("kdv_real_evolve necesita datos reales")
    if dt <= 0 or T < 0:
        raise ValueError("paso y horizonte deben ser positivos")
    n = u0.n
    k = 2 * np.pi * np.fft.fftfreq(n, u0.period / n)
    ik = 1j * k
    ik_odd = ik.copy()
    ik_odd[n // 2] = 0.0

    def nonlinear(v):
        u = np.real(np.fft.ifft(v))
        return -3 * ik_odd * np.fft.fft(u**2)

    integrator = ETDRK4(-(ik**3), nonlinear)
    v = np.fft.fft(np.real(u0.values))
    limit = 1e3 * max(float(np.max(np.abs(u0.values))), 1e-12)
    steps = int(np.ceil(T / dt - 1e-12)) if T > 0 else 0
    h = T / steps if steps else 0.0
    for _ in range(steps):
        v = integrator.step(v, h)
        if not np.all(np.isfinite(v)) or np.max(np.abs(np.fft.ifft(v))) > limit:
            raise BlowupDetected("la solución de KdV explota")
    out = u0.with_values(np.real(np.fft.ifft(v)))
    m0, e0 = kdv_invariants(u0)
    m1, e1 = kdv_invariants(out)
    logger.info("KDV: deriva de masa %.2e, deriva de L2 %.2e", abs(m1 - m0), abs(e1 - e0))
    return out


# --- Flujos de la jerarquía ---


def line_jets(line: SampledLine, order: int) -> np.ndarray:
    """Array (N, order+1) con u, u', ..., u^(order) espectrales."""
    cols = [line.values] + [spectral_derivative(line, k).values for k in range(1, order + 1)]
    return diffpoly.jets_from_samples(cols)


def analytic_jets(u, z, order: int, r: float = 0.1, points: int = 64) -> np.ndarray:
    """Jets por la fórmula de Cauchy para una función evaluable fuera de la línea."""
    z = np.asarray(z, dtype=complex)
    cols = [np.asarray(u(z), dtype=complex)]
    cols += [cauchy_derivative(u, z, k, r, points) for k in range(1, order + 1)]
    return diffpoly.jets_from_samples(cols)


def flow_translate(line: SampledLine, tau: float) -> SampledLine:
    """Flujo n = 0 (∂u/∂t₀ = -u') durante τ: u(z - τ), por continuación espectral."""
    n = line.n
    k = np.fft.fftfreq(n, 1.0 / n)
    if line.antiperiodic:
        k = k + 0.5
        twist = np.exp(1j * np.pi * line.y / line.period)
        coeffs = np.fft.fft(line.values / twist)
    else:
        twist = 1.0
        coeffs = np.fft.fft(line.values)
    out = np.fft.ifft(coeffs * np.exp(-tau * 2 * np.pi * k / line.period)) * twist
    return line.with_values(out)


def evolve_flow(line: SampledLine, n: int, T: float, dt: float) -> SampledLine:
    """∂u/∂t_n = -∂_z 𝒫_{n+1}(u) con RK4 clásico y jets espectrales."""
    rhs_poly = diffpoly.flow_rhs(n)
    order = rhs_poly.max_order

    def rhs(values):
        return diffpoly.evaluate(rhs_poly, line_jets(line.with_values(values), order))

    steps = max(1, int(np.ceil(abs(T) / dt - 1e-12)))
    h = T / steps
    u = line.values
    for _ in range(steps):
        k1 = rhs(u)
        k2 = rhs(u + 0.5 * h * k1)
        k3 = rhs(u + 0.5 * h * k2)
        k4 = rhs(u + h * k3)
        u = u + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
    return line.with_values(u)


def stationary_check(u: SampledLine) -> float:
    """Prueba estacionaria n = 1: desviación de 𝒫₂(u) = u'' + 3u² respecto a su media."""
    p2 = diffpoly.evaluate(diffpoly.kdv_P(2), line_jets(u, 2))
    return float(np.max(np.abs(p2 - np.mean(p2))))


def _uncancelled(p: diffpoly.DiffPoly, jets: np.ndarray) -> np.ndarray:
    out = np.zeros(jets.shape[0])
    for m in p.terms:
        term = np.full(jets.shape[0], abs(float(m.coefficient)))
        for k, e in m.exponents:
            term = term * np.abs(jets[:, k]) ** e
        out += term
    return out


@dataclass(frozen=True)
class RankReport:
    rank: int
    singular_values: np.ndarray
    dependent_at: int | None
    coefficients: np.ndarray | None
    residual: float | None

    @property
    def deficient(self) -> bool:
        return self.dependent_at is not None

    def as_dict(self) -> dict:
        return {
            "rank": self.rank,
            "singular_values": [float(s) for s in self.singular_values],
            "dependent_at": self.dependent_at,
            "coefficients": None
            if self.coefficients is None
            else [[float(c.real), float(c.imag)] for c in self.coefficients],
            "residual": self.residual,
        }


def algebro_geometric_rank(u, n_max: int = 3, z=None) -> RankReport:
    """
    Rango numérico de [∂u/∂t₀ … ∂u/∂t_{n_max}] y primera dependencia lineal.

    Cada columna se escala por la norma de sus términos sin cancelar, de modo
    que un flujo que se anula por cancelación exacta cuenta como cero. El
    umbral es 1e-8·σ₁.

    Args:
        u (SampledLine | AnalyticFn): potencial; una línea usa jets
            espectrales, una función usa jets de Cauchy en los puntos `z`.
        n_max (int): último flujo, de 2 a 5.
    """
    if not 1 <= n_max <= 5:
        raise ValueError("n_max debe estar entre 1 y 5")
    order = 2 * n_max + 1
    jets = line_jets(u, order) if isinstance(u, SampledLine) else analytic_jets(u, z, order)
    flows, scaled = [], []
    for k in range(n_max + 1):
        poly = diffpoly.flow_rhs(k)
        col = diffpoly.evaluate(poly, jets)
        size = float(np.linalg.norm(_uncancelled(poly, jets)))
        flows.append(col)
        scaled.append(col / size if size > 0 else np.zeros_like(col))
    F = np.column_stack(flows)
    S = np.column_stack(scaled)
    sv = np.linalg.svd(S, compute_uv=False)
    threshold = RANK_THRESHOLD * sv[0] if sv[0] > 0 else 0.0
    rank = int(np.sum(sv > threshold)) if sv[0] > 0 else 0
    for n in range(1, n_max + 1):
        sub = np.linalg.svd(S[:, : n + 1], compute_uv=False)
        sub_rank = int(np.sum(sub > RANK_THRESHOLD * sub[0])) if sub[0] > 0 else 0
        if sub_rank <= n:
            coeffs, *_ = np.linalg.lstsq(F[:, :n], F[:, n], rcond=None)
            scale = max(float(np.linalg.norm(_uncancelled(diffpoly.flow_rhs(n), jets))), 1e-300)
            residual = float(np.linalg.norm(F[:, :n] @ coeffs - F[:, n])) / scale
            logger.info("AG: dependencia en n=%d, coeficientes %s", n, coeffs)
            return RankReport(rank, sv, n, coeffs, residual)
    return RankReport(rank, sv, None, None, None)


# --- Polos ---


@dataclass
class PoleTrack:
    """Por polo seguido, lista de (t, z₀(t), c_{-2}(t))."""

    tracks: dict = field(default_factory=dict)

    def record(self, label: str, t: complex, z0: complex, c2: complex) -> None:
        self.tracks.setdefault(label, []).append((t, complex(z0), complex(c2)))

    def positions(self, label: str) -> np.ndarray:
        return np.array([z for _, z, _ in self.tracks[label]])

    def leading(self, label: str) -> np.ndarray:
        return np.array([c for _, _, c in self.tracks[label]])

    def as_rows(self):
        for label, rows in self.tracks.items():
            for t, z0, c2 in rows:
                yield label, t, z0, c2


def pole_propagation(family, z0: complex, r: float = 0.1, m: int = 4, tol: float = 1e-12,
                     max_iter: int = 30, label: str = "pole") -> PoleTrack:
    """
    Sigue un polo doble a través de una familia [(t, u_t)].

    En cada t se corrige la posición con Newton sobre el jet local: si el
    polo real está en ẑ + δ, el jet centrado en ẑ tiene c_{-3} = 2δ·c_{-2}.

    Raises:
        TrackLost: si el jet deja de ver un polo doble o la posición salta.
    """
    track = PoleTrack()
    z = complex(z0)
    for t, u in family:
        start = z
        for _ in range(max_iter):
            try:
                jet = laurent_jet(u, z, m, r)
            except NoConvergence as e:
                raise TrackLost(f"jet sin converger en t={t}") from e
            c2, c3 = jet.coefficient(-2), jet.coefficient(-3)
            if abs(c2) < 1e-12:
                raise TrackLost(f"no hay polo doble cerca de {z} en t={t}")
            delta = c3 / (2 * c2)
            z += delta
            if abs(z - start) > r / 2:
                raise TrackLost(f"el polo salta más de {r / 2:g} en t={t}")
            if abs(delta) < tol:
                break
        track.record(label, t, z, laurent_jet(u, z, m, r).coefficient(-2))
    return track


def locate_pole(u: SampledLine, side: int, k: int = 3):
    """
    Polo doble más cercano a un lado de la línea a partir del espectro.

    Un polo a/(z-z₀)² periodizado aporta c_{±k} = 4a(π/L)²k·e^{±2πk(x₀-z₀)/L}
    para los modos del lado del polo (± = side).

    Returns:
        tuple: (z₀, a)
    """
    L = u.period
    coeffs = np.fft.fft(u.values) / u.n
    ck, ck1 = coeffs[side * k], coeffs[side * (k + 1)]
    ratio = ck1 * k / (ck * (k + 1))
    z0 = u.x0 - side * np.log(ratio) * L / (2 * np.pi)
    z0 = complex(z0.real, z0.imag % L)
    a = ck * np.exp(-side * 2 * np.pi * k * (u.x0 - z0) / L) / (4 * (np.pi / L) ** 2 * k)
    return z0, complex(a)


# --- Flujo de Shiffman ---


@dataclass(frozen=True, eq=False)
class FlowState:
    """Estado del flujo: u, y = g^{-1/2} y g directo sobre una línea."""

    t: complex
    u: SampledLine
    y: SampledLine | None
    g: SampledLine | None
    conserved: dict

    def __post_init__(self):
        if self.y is not None:
            g = self.y.values ** -2
            if np.min(np.abs(g)) < 1e-8:
                raise ValueError("g = y⁻² se acerca a 0 sobre la línea")


def line_periods(g: SampledLine) -> dict:
    """∮dz/g y ∮g dz sobre la línea vertical (dz = i dy)."""
    L = g.period
    return {
        "dz_over_g": complex(1j * L * np.mean(1.0 / g.values)),
        "g_dz": complex(1j * L * np.mean(g.values)),
    }


def flow_state(data: WeierstrassData, x0: float | None = None, n: int = 64) -> FlowState:
    """
    Estado inicial del flujo de Shiffman sobre Re z = x0.

    Raises:
        PoleCollision: si un cero o polo de g queda a menos de 5 pasos de la línea.
    """
    x0 = float(data.base_point.real) if x0 is None else x0
    period = abs(data.chart.period) or 1.0
    margin = 5 * period / n
    for loc, _ in data.g.singularities:
        if abs(complex(loc).real - x0) < margin:
            raise PoleCollision(f"singularidad {loc} a menos de {margin:g} de la línea")
    line = SampledLine(x0, np.zeros(n), period=period)
    g = line.with_values(data.g(line.z))
    return FlowState(0j, u_from_g(data, line), sqrt_branch(g), g, line_periods(g))


class _Field:
    """Transformada de una línea, con giro para los campos antiperiódicos."""

    def __init__(self, line: SampledLine):
        n = line.n
        k = np.fft.fftfreq(n, 1.0 / n)
        if line.antiperiodic:
            k = k + 0.5
            self.twist = np.exp(1j * np.pi * line.y / line.period)
        else:
            k[n // 2] = 0.0
            self.twist = np.ones(n)
        self.d = 2 * np.pi * k / line.period

    def forward(self, values):
        return np.fft.fft(values / self.twist)

    def inverse(self, coeffs):
        return np.fft.ifft(coeffs) * self.twist

    def dz(self, coeffs, order=1):
        return self.inverse(self.d**order * coeffs)


@dataclass(frozen=True)
class FlowLogRow:
    t: float
    step: float
    dz_over_g_drift: float
    g_dz_drift: float
    route_discrepancy: float
    gauge_discrepancy: float
    poles: tuple

    def as_row(self) -> list:
        row = [self.t, self.step, self.dz_over_g_drift, self.g_dz_drift,
               self.route_discrepancy, self.gauge_discrepancy]
        for z0, c2 in self.poles:
            row += [z0.real, z0.imag, c2.real]
        return row


@dataclass(frozen=True, eq=False)
class FlowResult:
    state: FlowState
    track: PoleTrack
    log: tuple

    def max_drift(self) -> float:
        return max((max(r.dz_over_g_drift, r.g_dz_drift) for r in self.log), default=0.0)

    def max_route_discrepancy(self) -> float:
        return max((r.route_discrepancy for r in self.log), default=0.0)

    def max_gauge_discrepancy(self) -> float:
        return max((r.gauge_discrepancy for r in self.log), default=0.0)

    def spacing_drift(self) -> float:
        right = self.track.positions("right")
        left = self.track.positions("left")
        spacing = (right - left).real
        return float(np.max(np.abs(spacing - spacing[0])))


def _drift(now: complex, ref: complex) -> float:
    return abs(now - ref) / max(abs(ref), 1e-300)


def shiffman_evolve(state: FlowState, T: float, dt: float, tol: float = 1e-8,
                    gauge: complex = SHIFFMAN_GAUGE, min_step: float = 1e-9,
                    gauge_tol: float = 1e-5) -> FlowResult:
    """
    Integra el flujo de Shiffman por dos rutas: g directo y (u, y) con g = y⁻².

    Pasos ETDRK4 aceptados por comparación con dos medios pasos (error local
    relativo < tol). En cada paso aceptado se registran la deriva de los
    periodos ∮dz/g y ∮g dz, la discrepancia entre rutas, la diferencia entre
    u evolucionada y u(g_t), y los polos de u a ambos lados de la línea.

    Raises:
        PoleCollision: si un polo seguido se acerca a 2 pasos de malla.
        BlowupDetected: si el paso cae por debajo de `min_step` o los valores explotan.
        GaugeMismatch: si u se separa de u(g_t) más de `gauge_tol` (relativo).
    """
    if state.y is None or state.g is None:
        raise ValueError("el estado necesita las rutas g e y")
    fg, fu, fy = _Field(state.g), _Field(state.u), _Field(state.y)
    n = state.u.n
    zeros = np.zeros(n)
    linear = np.stack([gauge * fg.d**3, gauge * fu.d**3, zeros])

    def nonlinear(v):
        cg, cu, cy = v
        g, g1, g2 = fg.inverse(cg), fg.dz(cg, 1), fg.dz(cg, 2)
        u, u1 = fu.inverse(cu), fu.dz(cu, 1)
        y, y1 = fy.inverse(cy), fy.dz(cy, 1)
        ng = gauge * (-3 * g1 * g2 / g + 1.5 * g1**3 / g**2)
        nu = gauge * 6 * u * u1
        ny = -gauge * (u1 * y - 2 * u * y1)
        return np.stack([fg.forward(ng), fu.forward(nu), fy.forward(ny)])

    def physical(v):
        return np.stack([fg.inverse(v[0]), fu.inverse(v[1]), fy.inverse(v[2])])

    integrator = ETDRK4(linear, nonlinear)
    v = np.stack([fg.forward(state.g.values), fu.forward(state.u.values), fy.forward(state.y.values)])
    limit = 1e3 * float(np.max(np.abs(physical(v))))
    grid_step = state.u.period / n
    track = PoleTrack()
    rows = []
    t, h = 0.0, min(dt, T)

    def observe(t_now, step, vals):
        g_line = state.g.with_values(vals[0])
        u_line = state.u.with_values(vals[1])
        y_vals = vals[2]
        periods = line_periods(g_line)
        g_from_y = y_vals**-2
        route = float(np.max(np.abs(vals[0] - g_from_y)) / np.max(np.abs(vals[0])))
        gc = fg.forward(vals[0])
        G, G1, G2 = vals[0], fg.dz(gc, 1), fg.dz(gc, 2)
        u_from_route = -0.75 * (G1 / G) ** 2 + 0.5 * G2 / G
        gauge_gap = float(np.max(np.abs(u_from_route - vals[1])) / np.max(np.abs(vals[1])))
        if gauge_gap > gauge_tol:
            raise GaugeMismatch(f"u se separa de u(g) en {gauge_gap:.3e} en t={t_now:g}")
        poles = []
        for label, side in (("right", 1), ("left", -1)):
            z0, c2 = locate_pole(u_line, side)
            if abs(z0.real - u_line.x0) < 2 * grid_step:
                raise PoleCollision(f"el polo {label} llega a la línea en t={t_now:g}")
            track.record(label, t_now, z0, c2)
            poles.append((z0, c2))
        rows.append(FlowLogRow(
            t_now, step,
            _drift(periods["dz_over_g"], state.conserved["dz_over_g"]),
            _drift(periods["g_dz"], state.conserved["g_dz"]),
            route, gauge_gap, tuple(poles),
        ))

    observe(0.0, 0.0, physical(v))
    while t < T - 1e-15:
        h = min(h, T - t)
        full = integrator.step(v, h)
        half = integrator.step(integrator.step(v, h / 2), h / 2)
        pf, ph = physical(full), physical(half)
        if not np.all(np.isfinite(ph)) or np.max(np.abs(ph)) > limit:
            raise BlowupDetected(f"el flujo explota en t={t:g}")
        err = float(np.max(np.abs(pf - ph)) / max(1.0, float(np.max(np.abs(ph)))))
        if err > tol:
            h /= 2
            if h < min_step:
                raise BlowupDetected(f"paso por debajo de {min_step:g} en t={t:g}")
            continue
        v, t = half, t + h
        observe(t, h, ph)
        logger.debug("FLUJO: t=%.5f h=%.2e error local %.2e", t, h, err)
        if err < tol / 64:
            h = min(2 * h, dt)

    vals = physical(v)
    final = FlowState(
        complex(t),
        state.u.with_values(vals[1]),
        state.y.with_values(vals[2]),
        state.g.with_values(vals[0]),
        state.conserved,
    )
    result = FlowResult(final, track, tuple(rows))
    logger.info(
        "FLUJO: T=%g, %d pasos, deriva de periodos %.2e, discrepancia de rutas %.2e",
        T, len(rows) - 1, result.max_drift(), result.max_route_discrepancy(),
    )
    return result
