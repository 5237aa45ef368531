# -*- coding: utf-8 -*-
"""
Álgebra exacta de polinomios diferenciales en u, u', u'', ...

Los coeficientes son racionales exactos (`fractions.Fraction`). Con este
módulo se generan los operadores 𝒫ₙ(u) de la jerarquía KdV mediante la
recurrencia ∂_z 𝒫_{n+1} = (∂_zzz + 4u∂_z + 2u')𝒫ₙ, y se evalúan sobre
jets numéricos.

Formato textual: "u''' + 6*u*u'", "u^(4) + 10*u*u'' + 5*u'^2 + 10*u^3".
"""
from __future__ import annotations

import functools
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
import sympy

from wlab.errors import InsufficientJetOrder, NotExact

logger = logging.getLogger(__name__)

MAX_ORDER = 6


def _weight(exponents) -> int:
    return sum(e * (k + 2) for k, e in exponents)


def _orders(exponents) -> tuple:
    return tuple(k for k, e in exponents for _ in range(e))


def _sort_key(exponents):
    # peso, luego menos factores, luego órdenes altos primero
    orders = _orders(exponents)
    return (_weight(exponents), -len(orders), orders[::-1])


@dataclass(frozen=True)
class DiffMonomial:
    """
    Monomio c · ∏ (u^(k))^{e_k}.

    Atributos:
        coefficient (Fraction): coeficiente exacto, nunca cero.
        exponents (tuple): pares (k, e_k) ordenados por k, con e_k ≥ 1.
    """

    coefficient: Fraction
    exponents: tuple

    @property
    def weight(self) -> int:
        return _weight(self.exponents)

    def factor_text(self) -> str:
        parts = []
        for k, e in self.exponents:
            name = "u" + "'" * k if k <= 3 else f"u^({k})"
            parts.append(name if e == 1 else f"{name}^{e}")
        return "*".join(parts)


@dataclass(frozen=True)
class DiffPoly:
    """
    Polinomio diferencial en forma canónica.

    Los monomios se guardan ordenados de forma decreciente por
    (peso total, órdenes de derivada), fusionados y sin ceros, de modo que la
    igualdad estructural coincide con la igualdad algebraica.
    """

    terms: tuple = ()

    # --- construcción ---

    @classmethod
    def from_mapping(cls, mapping) -> "DiffPoly":
        items = [
            DiffMonomial(Fraction(c), tuple(key))
            for key, c in mapping.items()
            if c != 0
        ]
        items.sort(key=lambda m: _sort_key(m.exponents), reverse=True)
        return cls(tuple(items))

    @classmethod
    def constant(cls, value) -> "DiffPoly":
        return cls.from_mapping({(): Fraction(value)})

    @classmethod
    def u(cls, k: int = 0) -> "DiffPoly":
        """La variable u^(k)."""
        return cls.from_mapping({((k, 1),): Fraction(1)})

    @classmethod
    def zero(cls) -> "DiffPoly":
        return cls(())

    def as_mapping(self) -> dict:
        return {m.exponents: m.coefficient for m in self.terms}

    # --- aritmética ---

    def __add__(self, other):
        other = _coerce(other)
        acc = self.as_mapping()
        for m in other.terms:
            acc[m.exponents] = acc.get(m.exponents, Fraction(0)) + m.coefficient
        return DiffPoly.from_mapping(acc)

    __radd__ = __add__

    def __neg__(self):
        return DiffPoly.from_mapping({k: -c for k, c in self.as_mapping().items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        acc: dict = {}
        for a in self.terms:
            for b in other.terms:
                key = _merge(a.exponents, b.exponents)
                acc[key] = acc.get(key, Fraction(0)) + a.coefficient * b.coefficient
        return DiffPoly.from_mapping(acc)

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def max_order(self) -> int:
        """Mayor orden de derivada presente (-1 si es constante)."""
        return max((k for m in self.terms for k, _ in m.exponents), default=-1)

    def weights(self) -> set:
        return {m.weight for m in self.terms}

    def component(self, weight: int) -> "DiffPoly":
        return DiffPoly(tuple(m for m in self.terms if m.weight == weight))

    # --- texto ---

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for i, m in enumerate(self.terms):
            c = m.coefficient
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            factors = m.factor_text()
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = factors
            else:
                body = f"{mag}*{factors}"
            if i == 0:
                out.append(body if sign == "+" else f"-{body}")
            else:
                out.append(f" {sign} {body}")
        return "".join(out)

    @classmethod
    def parse(cls, text: str) -> "DiffPoly":
        """Inverso de `str`: acepta la notación con primas y u^(k)."""
        src = text.replace(" ", "")
        if src in ("", "0"):
            return cls.zero()
        if src[0] not in "+-":
            src = "+" + src
        acc = cls.zero()
        for sign, body in re.findall(r"([+-])([^+-]+)", src):
            coeff = Fraction(1)
            exps: dict = {}
            for token in body.split("*"):
                match = _FACTOR.fullmatch(token)
                if match is None:
                    coeff *= Fraction(token)
                    continue
                order = int(match.group(1)) if match.group(1) else len(match.group(2))
                power = int(match.group(3) or 1)
                exps[order] = exps.get(order, 0) + power
            key = tuple(sorted(exps.items()))
            term = cls.from_mapping({key: coeff})
            acc = acc + term if sign == "+" else acc - term
        return acc


_FACTOR = re.compile(r"u(?:\^\((\d+)\)|('*))(?:\^(\d+))?")


def _coerce(value) -> DiffPoly:
    if isinstance(value, DiffPoly):
        return value
    return DiffPoly.constant(value)


def _merge(a, b) -> tuple:
    exps = dict(a)
    for k, e in b:
        exps[k] = exps.get(k, 0) + e
    return tuple(sorted(exps.items()))


# --- operaciones ---


def total_derivative(p: DiffPoly) -> DiffPoly:
    """∂_z por la regla de Leibniz: cada factor u^(k) pasa a u^(k+1)."""
    acc: dict = {}
    for m in p.terms:
        for k, e in m.exponents:
            exps = dict(m.exponents)
            exps[k] -= 1
            if exps[k] == 0:
                del exps[k]
            exps[k + 1] = exps.get(k + 1, 0) + 1
            key = tuple(sorted(exps.items()))
            acc[key] = acc.get(key, Fraction(0)) + m.coefficient * e
    return DiffPoly.from_mapping(acc)


def derivative_power(p: DiffPoly, n: int) -> DiffPoly:
    for _ in range(n):
        p = total_derivative(p)
    return p


@functools.lru_cache(maxsize=None)
def monomials_of_weight(weight: int) -> tuple:
    """Todos los monomios no constantes de peso `weight` (peso de u^(k) = k+2)."""
    out = []

    def build(remaining, min_order, exps):
        if remaining == 0:
            if exps:
                out.append(tuple(sorted(exps.items())))
            return
        for k in range(min_order, remaining - 1):
            if k + 2 > remaining:
                break
            exps[k] = exps.get(k, 0) + 1
            build(remaining - (k + 2), k, exps)
            exps[k] -= 1
            if exps[k] == 0:
                del exps[k]

    build(weight, 0, {})
    return tuple(sorted(set(out), key=_sort_key))


def formal_integrate(p: DiffPoly) -> DiffPoly:
    """
    Devuelve q con ∂_z q = p, con constante de integración nula.

    Cada componente homogénea de peso w se ajusta con un ansatz sobre los
    monomios de peso w-1, resolviendo un sistema lineal racional exacto.

    Raises:
        NotExact: si p no es una derivada total.
    """
    result = DiffPoly.zero()
    for w in sorted(p.weights()):
        target = p.component(w)
        basis = monomials_of_weight(w - 1) if w >= 3 else ()
        if not basis:
            raise NotExact(f"la componente de peso {w} de '{target}' no es exacta")
        images = [total_derivative(DiffPoly.from_mapping({b: 1})) for b in basis]
        rows = sorted(
            {k for img in images for k in img.as_mapping()} | set(target.as_mapping()),
            key=_sort_key,
        )
        index = {k: i for i, k in enumerate(rows)}
        matrix = sympy.zeros(len(rows), len(basis))
        for j, img in enumerate(images):
            for key, c in img.as_mapping().items():
                matrix[index[key], j] = sympy.Rational(c.numerator, c.denominator)
        rhs = sympy.zeros(len(rows), 1)
        for key, c in target.as_mapping().items():
            rhs[index[key], 0] = sympy.Rational(c.numerator, c.denominator)
        try:
            solution, params = matrix.gauss_jordan_solve(rhs)
        except ValueError as exc:
            raise NotExact(f"'{target}' no es una derivada total") from exc
        if params.shape[0]:
            solution = solution.subs({s: 0 for s in params})
        coeffs = {
            b: Fraction(int(sympy.fraction(v)[0]), int(sympy.fraction(v)[1]))
            for b, v in zip(basis, solution)
            if v != 0
        }
        result = result + DiffPoly.from_mapping(coeffs)
    return result


def recursion_operator(p: DiffPoly) -> DiffPoly:
    """(∂_zzz + 4u∂_z + 2u') aplicado a p."""
    dp = total_derivative(p)
    return derivative_power(dp, 2) + 4 * DiffPoly.u() * dp + 2 * DiffPoly.u(1) * p


@functools.lru_cache(maxsize=None)
def _hierarchy(n: int) -> DiffPoly:
    if n == 0:
        return DiffPoly.constant(Fraction(1, 2))
    return formal_integrate(recursion_operator(_hierarchy(n - 1)))


def kdv_P(n: int, max_order: int = MAX_ORDER) -> DiffPoly:
    """
    Operador 𝒫ₙ(u) de la jerarquía KdV.

    Args:
        n (int): índice, 0 ≤ n ≤ max_order.
        max_order (int): tope configurado.
    """
    if not 0 <= n <= max_order:
        raise ValueError(f"n={n} fuera de 0..{max_order}")
    return _hierarchy(n)


def flow_rhs(n: int) -> DiffPoly:
    """Lado derecho del n-ésimo flujo: ∂u/∂tₙ = -∂_z 𝒫_{n+1}(u)."""
    if not 0 <= n <= MAX_ORDER - 1:
        raise ValueError(f"n={n} fuera de 0..{MAX_ORDER - 1}")
    return -total_derivative(kdv_P(n + 1))


def evaluate(p: DiffPoly, u_jets) -> np.ndarray:
    """
    Evalúa p sobre muestras (u, u', ..., u^(K)).

    Args:
        p (DiffPoly): polinomio a evaluar.
        u_jets: secuencia de tuplas por muestra, o array (M, K+1).

    Returns:
        np.ndarray: valores complejos, uno por muestra.
    """
    jets = np.asarray(u_jets, dtype=complex)
    if jets.ndim == 1:
        jets = jets[:, None]
    if p.max_order >= jets.shape[1]:
        raise InsufficientJetOrder(
            f"'{p}' necesita u^({p.max_order}) y los jets llegan a {jets.shape[1] - 1}"
        )
    out = np.zeros(jets.shape[0], dtype=complex)
    for m in p.terms:
        term = np.full(jets.shape[0], float(m.coefficient), dtype=complex)
        for k, e in m.exponents:
            term = term * jets[:, k] ** e
        out += term
    return out


def partial(p: DiffPoly, order: int) -> DiffPoly:
    """Derivada parcial ∂p/∂u^(order)."""
    acc: dict = {}
    for m in p.terms:
        exps = dict(m.exponents)
        e = exps.get(order, 0)
        if e == 0:
            continue
        exps[order] = e - 1
        if exps[order] == 0:
            del exps[order]
        key = tuple(sorted(exps.items()))
        acc[key] = acc.get(key, Fraction(0)) + m.coefficient * e
    return DiffPoly.from_mapping(acc)


def flow_derivative(f: DiffPoly, velocity: DiffPoly) -> DiffPoly:
    """Derivada de f a lo largo de ∂u/∂t = velocity: Σ_m ∂f/∂u^(m) · ∂_z^m velocity."""
    acc = DiffPoly.zero()
    dv = velocity
    for m in range(f.max_order + 1):
        acc = acc + partial(f, m) * dv
        dv = total_derivative(dv)
    return acc


def mixed_flow_commutator(j: int, k: int) -> DiffPoly:
    """∂_{t_j}(flow_rhs(k)) - ∂_{t_k}(flow_rhs(j)); nulo si los flujos conmutan."""
    if j == k:
        raise ValueError("el conmutador necesita dos flujos distintos")
    for idx in (j, k):
        if not 0 <= idx <= 3:
            raise ValueError(f"índice de flujo {idx} fuera de 0..3")
    fj, fk = flow_rhs(j), flow_rhs(k)
    return flow_derivative(fk, fj) - flow_derivative(fj, fk)


def hierarchy_text(n: int) -> list[str]:
    """Líneas 'P_k = ...' para k = 0..n."""
    return [f"P_{k} = {kdv_P(k)}" for k in range(n + 1)]


def jets_from_samples(columns: Sequence[Iterable[complex]]) -> np.ndarray:
    """Apila columnas u, u', ..., u^(K) en el array (M, K+1) que usa `evaluate`."""
    return np.stack([np.asarray(c, dtype=complex) for c in columns], axis=1)
