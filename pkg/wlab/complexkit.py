# -*- coding: utf-8 -*-
"""
Sustrato de análisis complejo.

Cuadratura adaptativa sobre contornos poligonales, residuos, coeficientes de
Laurent, conteo de ceros y polos por el principio del argumento, y derivadas
espectrales sobre líneas verticales del cilindro ℂ/⟨i⟩.

Contenido:
    Contour, AnalyticFn, LaurentJet, SampledLine: tipos del módulo.
    contour_integrate, residue_at, laurent_jet, count_zeros_poles,
    spectral_derivative, cauchy_derivative: operaciones.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from wlab.errors import (
    AliasingDetected,
    MultipleSingularities,
    NoConvergence,
    SingularityOnPath,
    ZeroOnPath,
)

logger = logging.getLogger(__name__)

POLE_GUARD = 1e-3
MIN_SAMPLES = 8


@dataclass(frozen=True, eq=False)
class Contour:
    """
    Camino poligonal orientado en el plano de la carta.

    Atributos:
        samples: vértices complejos en orden de recorrido.
        closed: si el camino es cerrado (módulo `period`).
        orientation: +1 recorre `samples` en orden, -1 al revés.
        period: traslación de cubierta; un contorno cerrado cumple
            samples[-1] == samples[0] + period.
        sheets: signo (+1/-1) de cada segmento sobre la cubierta doble.
    """

    samples: np.ndarray
    closed: bool = True
    orientation: int = 1
    period: complex = 0j
    sheets: np.ndarray | None = None

    def __post_init__(self):
        pts = np.asarray(self.samples, dtype=complex)
        object.__setattr__(self, "samples", pts)
        if pts.ndim != 1 or pts.size < MIN_SAMPLES:
            raise ValueError(f"un contorno necesita al menos {MIN_SAMPLES} muestras")
        if np.any(np.abs(np.diff(pts)) == 0):
            raise ValueError("muestras consecutivas repetidas")
        if self.orientation not in (1, -1):
            raise ValueError("orientation debe ser +1 o -1")
        if self.closed:
            gap = abs(pts[-1] - pts[0] - self.period)
            if gap > 1e-12 * max(1.0, float(np.max(np.abs(pts)))):
                raise ValueError("contorno cerrado cuyos extremos no coinciden")
        if self.sheets is None:
            object.__setattr__(self, "sheets", np.ones(pts.size - 1))
        else:
            sheets = np.asarray(self.sheets, dtype=float)
            if sheets.shape != (pts.size - 1,):
                raise ValueError("se necesita un signo de hoja por segmento")
            object.__setattr__(self, "sheets", sheets)

    @property
    def segments(self) -> int:
        return self.samples.size - 1

    @property
    def length(self) -> float:
        return float(np.sum(np.abs(np.diff(self.samples))))

    def reversed(self) -> "Contour":
        """El mismo camino con la orientación opuesta."""
        return replace(self, orientation=-self.orientation)

    def shifted(self, offset: complex) -> "Contour":
        return replace(self, samples=self.samples + offset)

    @classmethod
    def circle(cls, center: complex, radius: float, n: int = 64, orientation: int = 1):
        """Polígono regular de `n` lados inscrito en el círculo."""
        theta = 2 * np.pi * np.arange(n + 1) / n
        pts = center + radius * np.exp(1j * theta)
        pts[-1] = pts[0]
        return cls(pts, closed=True, orientation=orientation)

    @classmethod
    def segment(cls, a: complex, b: complex, n: int = MIN_SAMPLES):
        t = np.linspace(0.0, 1.0, max(n, MIN_SAMPLES))
        return cls(a + (b - a) * t, closed=False)

    @classmethod
    def polyline(cls, points: Sequence[complex], per_edge: int = 4):
        """Camino abierto que une `points`, subdividiendo cada arista."""
        pts = [complex(points[0])]
        for a, b in zip(points[:-1], points[1:]):
            if a == b:
                continue
            for t in np.arange(1, per_edge + 1) / per_edge:
                pts.append(complex(a + (b - a) * t))
        if len(pts) < MIN_SAMPLES:
            pts = _resample(pts, MIN_SAMPLES)
        return cls(np.array(pts), closed=False)

    @classmethod
    def vertical_loop(cls, x0: float, n: int = 64, y0: float = 0.0, period: float = 1.0):
        """Ciclo generador del cilindro ℂ/⟨i·period⟩ a lo largo de Re z = x0."""
        pts = x0 + 1j * (y0 + period * np.arange(n + 1) / n)
        return cls(pts, closed=True, period=1j * period)

    @classmethod
    def horizontal_loop(cls, y0: float, period: float, n: int = 64, x0: float = 0.0):
        """Ciclo Im z = y0 cerrado módulo una traslación real."""
        pts = x0 + period * np.arange(n + 1) / n + 1j * y0
        return cls(pts, closed=True, period=complex(period))


def _resample(points, count):
    """Reparte `count` puntos a lo largo de la poligonal `points`."""
    pts = np.asarray(points, dtype=complex)
    arc = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(pts)))])
    targets = np.linspace(0.0, arc[-1], count)
    re = np.interp(targets, arc, pts.real)
    im = np.interp(targets, arc, pts.imag)
    return list(re + 1j * im)


@dataclass(frozen=True)
class AnalyticFn:
    """
    Función meromorfa evaluable de forma vectorizada.

    Atributos:
        evaluator: función pura de arrays complejos en arrays complejos.
        singularities: pares (posición, orden) declarados.
        name: etiqueta para los registros.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    singularities: tuple = ()
    name: str = "f"

    def __call__(self, z):
        return self.evaluator(np.asarray(z, dtype=complex))

    @classmethod
    def constant(cls, value: complex, name: str = "const"):
        c = complex(value)
        return cls(lambda z: np.full(np.shape(z), c, dtype=complex), (), name)

    def with_singularities(self, singularities) -> "AnalyticFn":
        return replace(self, singularities=tuple(singularities))

    def locations(self) -> np.ndarray:
        return np.array([complex(s[0]) for s in self.singularities], dtype=complex)


@dataclass(frozen=True, eq=False)
class LaurentJet:
    """Coeficientes c_{-m}..c_{+m} de una serie de Laurent en `center`."""

    center: complex
    coefficients: np.ndarray
    radius: float

    @property
    def m(self) -> int:
        return (self.coefficients.size - 1) // 2

    def coefficient(self, k: int) -> complex:
        if abs(k) > self.m:
            raise IndexError(k)
        return complex(self.coefficients[k + self.m])

    def tail_decays(self) -> bool:
        """Chequeo de analiticidad: |c_k| r^k no crece en la mitad superior."""
        ks = np.arange(self.m // 2 + 1, self.m + 1)
        if ks.size < 2:
            return True
        tail = np.abs(self.coefficients[ks + self.m]) * self.radius ** ks
        scale = max(float(np.max(np.abs(self.coefficients))), 1e-300)
        return bool(np.all(tail <= 10 * tail[0] + 1e-12 * scale))


@dataclass(frozen=True, eq=False)
class SampledLine:
    """
    Muestras complejas sobre la línea Re z = x0 del cilindro ℂ/⟨i⟩.

    Los nodos son y_j = L·j/N, j = 0..N-1, con L = `period`. Con
    `antiperiodic` la función cambia de signo al dar la vuelta:
    f(z + iL) = -f(z).
    """

    x0: float
    values: np.ndarray
    antiperiodic: bool = False
    period: float = 1.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        n = vals.size
        if n < 2 or n & (n - 1):
            raise ValueError("el número de muestras debe ser potencia de dos")
        if not np.all(np.isfinite(vals)):
            raise ValueError("muestras no finitas en la línea")
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def y(self) -> np.ndarray:
        return self.period * np.arange(self.n) / self.n

    @property
    def z(self) -> np.ndarray:
        return self.x0 + 1j * self.y

    def with_values(self, values) -> "SampledLine":
        return replace(self, values=np.asarray(values, dtype=complex))

    @classmethod
    def sample(cls, f, x0: float, n: int, antiperiodic: bool = False, period: float = 1.0):
        z = x0 + 1j * period * np.arange(n) / n
        return cls(x0, np.asarray(f(z), dtype=complex), antiperiodic, period)

    def spectrum(self) -> np.ndarray:
        vals = self.values
        if self.antiperiodic:
            vals = vals * np.exp(-1j * np.pi * self.y / self.period)
        return np.fft.fft(vals) / self.n

    def energy_ratio(self) -> float:
        """Fracción de energía espectral en el tercio superior de modos."""
        coeffs = self.spectrum()
        k = np.abs(np.fft.fftfreq(self.n, 1.0 / self.n))
        total = float(np.sum(np.abs(coeffs) ** 2))
        if total == 0.0:
            return 0.0
        return float(np.sum(np.abs(coeffs[k > self.n / 3]) ** 2)) / total


# --- Cuadratura ---


def _segment_distance(points: np.ndarray, a: complex, b: complex) -> np.ndarray:
    d = b - a
    t = np.clip(((points - a) * np.conj(d)).real / abs(d) ** 2, 0.0, 1.0)
    return np.abs(points - (a + t * d))


def check_path(f: AnalyticFn, c: Contour, pole_guard: float = POLE_GUARD) -> None:
    """Lanza SingularityOnPath si una singularidad toca el camino."""
    locs = f.locations()
    if locs.size == 0:
        return
    # las singularidades de funciones periódicas se replican por el periodo
    if c.period:
        locs = np.concatenate([locs + j * c.period for j in (-1, 0, 1)])
    for a, b in zip(c.samples[:-1], c.samples[1:]):
        dist = _segment_distance(locs, a, b)
        if np.any(dist < pole_guard):
            bad = locs[np.argmin(dist)]
            raise SingularityOnPath(
                f"la singularidad {bad:.6g} de '{f.name}' está a menos de "
                f"{pole_guard:g} del contorno"
            )


def contour_integrate(
    f,
    c: Contour,
    tol: float = 1e-10,
    pole_guard: float = POLE_GUARD,
    limit: int = 200,
):
    """
    Integra `f` a lo largo de `c` con Gauss-Kronrod adaptativo por segmento.

    `f` puede devolver un escalar o un vector complejo por punto; el
    resultado tiene la misma forma. Los segmentos se suman en orden fijo.

    Args:
        f (AnalyticFn | callable): integrando.
        c (Contour): camino de integración.
        tol (float): error absoluto total admitido.
        pole_guard (float): distancia mínima a las singularidades declaradas.
        limit (int): subdivisiones máximas por segmento.

    Returns:
        complex | np.ndarray: el valor de la integral.
    """
    if isinstance(f, AnalyticFn):
        check_path(f, c, pole_guard)
    per_segment = tol / c.segments
    total = None
    for k, (a, b) in enumerate(zip(c.samples[:-1], c.samples[1:])):
        d = (b - a) * c.sheets[k]

        def integrand(s, a=a, b=b, d=d):
            val = np.atleast_1d(np.asarray(f(a + (b - a) * s), dtype=complex)) * d
            return np.concatenate([val.real, val.imag])

        res, err, info = integrate.quad_vec(
            integrand,
            0.0,
            1.0,
            epsabs=per_segment,
            epsrel=1e-13,
            limit=limit,
            full_output=True,
        )
        # status 2 es redondeo: se acepta mientras el error estimado sea útil
        if info.status != 0 and err > max(tol, 1e-12 * float(np.max(np.abs(res)))):
            raise NoConvergence(
                f"cuadratura sin converger en el segmento {k} (error {err:.3g})"
            )
        half = res.size // 2
        piece = res[:half] + 1j * res[half:]
        total = piece if total is None else total + piece
    total = c.orientation * total
    return complex(total[0]) if total.size == 1 else total


def residue_at(f: AnalyticFn, z0: complex, r: float, n: int = 64, tol: float = 1e-12):
    """
    Residuo de `f` en `z0` como (1/2πi) por la integral sobre |z - z0| = r.
    """
    locs = f.locations()
    if locs.size:
        dist = np.abs(locs - z0)
        if np.any((dist > 1e-12) & (dist < r)):
            raise MultipleSingularities(
                f"otra singularidad de '{f.name}' cae dentro del radio {r:g}"
            )
    value = contour_integrate(f, Contour.circle(z0, r, n), tol=tol, pole_guard=0.0)
    return value / (2j * np.pi)


def default_radius(f: AnalyticFn, z0: complex, fallback: float = 1.0) -> float:
    """Mitad de la distancia a la singularidad declarada más cercana (distinta de z0)."""
    locs = f.locations()
    if locs.size:
        dist = np.abs(locs - z0)
        dist = dist[dist > 1e-12]
        if dist.size:
            return 0.5 * float(np.min(dist))
    return fallback


def _trapezoid_coefficients(f, z0, r, n, ks):
    omega = np.exp(2j * np.pi * np.arange(n) / n)
    samples = np.asarray(f(z0 + r * omega), dtype=complex)
    fft = np.fft.fft(samples) / n
    return np.array([fft[k % n] / r**k for k in ks])


def laurent_jet(
    f: AnalyticFn,
    z0: complex,
    m: int = 4,
    r: float | None = None,
    tol: float = 1e-10,
    max_points: int = 8192,
) -> LaurentJet:
    """
    Coeficientes de Laurent por trapecios sobre un círculo, doblando nodos.

    Raises:
        NoConvergence: si dos refinamientos sucesivos no coinciden.
    """
    if r is None:
        r = default_radius(f, z0)
    ks = np.arange(-m, m + 1)
    n = max(32, 4 * (m + 1))
    n = 1 << (n - 1).bit_length()
    prev = _trapezoid_coefficients(f, z0, r, n, ks)
    while n < max_points:
        n *= 2
        cur = _trapezoid_coefficients(f, z0, r, n, ks)
        scale = max(1.0, float(np.max(np.abs(cur))))
        if np.max(np.abs(cur - prev)) <= tol * scale:
            logger.debug("LAURENT: %s en %s convergió con %d nodos", f.name, z0, n)
            return LaurentJet(complex(z0), cur, float(r))
        prev = cur
    raise NoConvergence(f"coeficientes de Laurent de '{f.name}' sin converger")


def count_zeros_poles(f, c: Contour, max_refine: int = 12) -> int:
    """
    Número de vueltas de f∘c (ceros menos polos encerrados).

    Se refina el muestreo hasta que ningún salto de argumento supere π/4.
    El valor crudo se redondea solo si está a menos de 0.1 de un entero.

    Raises:
        ZeroOnPath: si f se anula en el camino o el conteo no es entero.
    """
    if not c.closed:
        raise ValueError("el principio del argumento necesita un contorno cerrado")
    per_edge = 4
    for _ in range(max_refine):
        t = np.arange(per_edge) / per_edge
        a, b = c.samples[:-1], c.samples[1:]
        pts = (a[:, None] + (b - a)[:, None] * t[None, :]).ravel()
        pts = np.append(pts, c.samples[-1])
        vals = np.asarray(f(pts), dtype=complex)
        if np.any(~np.isfinite(vals)) or np.any(np.abs(vals) < 1e-300):
            raise ZeroOnPath("la función se anula o diverge sobre el contorno")
        steps = np.angle(vals[1:] / vals[:-1])
        if np.max(np.abs(steps)) < np.pi / 4:
            break
        per_edge *= 2
    else:
        raise ZeroOnPath("el argumento no se estabiliza: cero o polo cerca del camino")
    raw = c.orientation * float(np.sum(steps)) / (2 * np.pi)
    nearest = round(raw)
    if abs(raw - nearest) >= 0.1:
        raise ZeroOnPath(f"número de vueltas no entero ({raw:.4f})")
    return int(nearest)


# --- Derivadas ---


def spectral_derivative(
    line: SampledLine, order: int = 1, alias_tol: float = 1e-10
) -> SampledLine:
    """
    ∂_z^order sobre una línea vertical, como (-i ∂_y)^order por FFT.

    Las líneas antiperiódicas usan modos semienteros k + 1/2.

    Raises:
        AliasingDetected: si el tercio superior del espectro pesa demasiado.
    """
    if order < 0:
        raise ValueError("orden negativo")
    ratio = line.energy_ratio()
    if ratio > alias_tol:
        raise AliasingDetected(
            f"energía espectral alta {ratio:.3g} > {alias_tol:g}; refine la malla"
        )
    if order == 0:
        return line
    n = line.n
    k = np.fft.fftfreq(n, 1.0 / n)
    vals = line.values
    if line.antiperiodic:
        twist = np.exp(1j * np.pi * line.y / line.period)
        k = k + 0.5
        vals = vals / twist
    elif order % 2:
        # el modo de Nyquist solo es ambiguo en órdenes impares
        k[n // 2] = 0.0
    out = np.fft.ifft((2 * np.pi * k / line.period) ** order * np.fft.fft(vals))
    if line.antiperiodic:
        out = out * twist
    return line.with_values(out)


def cauchy_derivative(f, z, n: int = 1, r: float = 0.05, points: int = 32):
    """
    Derivada n-ésima de una función analítica por la fórmula de Cauchy.

    Usa trapecios sobre |w - z| = r; `r` debe ser menor que la distancia a
    la singularidad más cercana.
    """
    z = np.asarray(z, dtype=complex)
    omega = np.exp(2j * np.pi * np.arange(points) / points)
    samples = np.asarray(f(z[..., None] + r * omega), dtype=complex)
    coeff = np.mean(samples * omega ** (-n), axis=-1) / r**n
    return coeff * math.factorial(n)


def fd_derivative(f, z, h: float = 1e-3, axis: complex = 1.0):
    """Derivada centrada de cuarto orden de `f` en la dirección `axis`."""
    z = np.asarray(z, dtype=complex)
    s = h * axis
    return (-f(z + 2 * s) + 8 * f(z + s) - 8 * f(z - s) + f(z - 2 * s)) / (12 * h)
