"""Moyal star product on plane waves and polynomials, and the twisted product of
plane waves sitting at independent points.

Plane waves ``c e^{i phase} e^{i k.x}`` keep their phase exponent separate from
the complex coefficient, so chains of star products only add real numbers.
"""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .kinematics import DimensionMismatch, Momentum, SpacetimeDims, ThetaMatrix, wedge


@dataclass(frozen=True)
class PlaneWaveSymbol:
    """``coeff * exp(i*phase) * exp(i k.x)``."""

    coeff: complex
    momentum: Momentum
    phase: float = 0.0

    @property
    def dims(self) -> SpacetimeDims:
        return self.momentum.dims

    @property
    def value(self) -> complex:
        """Total complex prefactor, phase included."""
        if isinstance(self.phase, (int, float)):
            return self.coeff * cmath.exp(1j * self.phase)
        import sympy

        return self.coeff * sympy.exp(sympy.I * self.phase)

    def conjugate(self) -> PlaneWaveSymbol:
        return PlaneWaveSymbol(np.conj(self.coeff), -self.momentum, -self.phase)

    def scaled(self, c) -> PlaneWaveSymbol:
        return PlaneWaveSymbol(c * self.coeff, self.momentum, self.phase)

    def __call__(self, x) -> complex:
        x = np.asarray(x, dtype=float)
        return self.value * cmath.exp(1j * float(self.momentum.components @ x))


def star_plane(theta: ThetaMatrix, f: PlaneWaveSymbol, g: PlaneWaveSymbol) -> PlaneWaveSymbol:
    # each derivative on e^{ik.x} brings down i*k, so the bidifferential
    # exponential collapses to exp((i/2) theta (ip)(iq)) = exp(-(i/2) wedge)
    if f.dims != g.dims:
        raise DimensionMismatch("plane waves live in different spacetimes")
    w = wedge(theta, f.momentum, g.momentum)
    return PlaneWaveSymbol(f.coeff * g.coeff, f.momentum + g.momentum, f.phase + g.phase - w / 2)


Monomial = tuple  # exponent vector over the 1+d+l coordinates


class PolySymbol:
    """Polynomial in the spacetime coordinates, stored as ``{exponents: coeff}``.

    Coefficients are Python numbers, or sympy expressions when built against a
    symbolic theta.
    """

    __slots__ = ("dims", "terms")

    def __init__(self, dims: SpacetimeDims, terms: Mapping[Monomial, object] | None = None):
        self.dims = dims
        clean = {}
        for mono, c in (terms or {}).items():
            mono = tuple(int(a) for a in mono)
            if len(mono) != dims.total or min(mono, default=0) < 0:
                raise DimensionMismatch(f"bad exponent vector {mono} for {dims.total} coordinates")
            c = _simplify(c)
            if not _is_zero(c):
                clean[mono] = clean.get(mono, 0) + c
        self.terms = {m: c for m, c in clean.items() if not _is_zero(c)}

    @classmethod
    def constant(cls, dims: SpacetimeDims, c) -> PolySymbol:
        return cls(dims, {(0,) * dims.total: c})

    @classmethod
    def coordinate(cls, dims: SpacetimeDims, mu: int) -> PolySymbol:
        if not 0 <= mu < dims.total:
            raise DimensionMismatch(f"coordinate index {mu} out of range")
        mono = [0] * dims.total
        mono[mu] = 1
        return cls(dims, {tuple(mono): 1})

    @property
    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self):
        return self.terms.get((0,) * self.dims.total, 0)

    def _check(self, other: PolySymbol):
        if self.dims != other.dims:
            raise DimensionMismatch("polynomials live in different spacetimes")

    def __add__(self, other: PolySymbol) -> PolySymbol:
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return PolySymbol(self.dims, out)

    def __neg__(self) -> PolySymbol:
        return PolySymbol(self.dims, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: PolySymbol) -> PolySymbol:
        return self + (-other)

    def scaled(self, c) -> PolySymbol:
        return PolySymbol(self.dims, {m: c * v for m, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, PolySymbol) and self.dims == other.dims and self.terms == other.terms

    def max_abs_diff(self, other: PolySymbol) -> float:
        diff = self - other
        return max((abs(complex(c)) for c in diff.terms.values()), default=0.0)

    def __call__(self, x) -> complex:
        x = np.asarray(x, dtype=float)
        return sum(c * np.prod(x ** np.array(m)) for m, c in self.terms.items())

    def __repr__(self):
        return f"PolySymbol({self.terms})"


def _is_zero(c) -> bool:
    if isinstance(c, (int, float, complex)):
        return c == 0
    return c == 0 or getattr(c, "is_zero", False) is True


def _simplify(c):
    if isinstance(c, (int, float, complex)):
        return c
    import sympy

    return sympy.expand(c) if isinstance(c, sympy.Basic) else c


def _derive(mono: Monomial, mu: int):
    """``d_mu x^mono`` as ``(factor, new_mono)``; factor 0 when it vanishes."""
    a = mono[mu]
    if a == 0:
        return 0, None
    return a, mono[:mu] + (a - 1,) + mono[mu + 1 :]


def star_poly(theta: ThetaMatrix, f: PolySymbol, g: PolySymbol) -> PolySymbol:
    """Finite Moyal series ``sum_n (i/2)^n / n! (theta^{mu nu} d'_mu d''_nu)^n (f g)``.

    The bidifferential operator is applied repeatedly to ``f(x') g(x'')`` kept
    as a dict over monomial pairs, so like terms merge between orders.
    """
    f._check(g)
    if f.dims != theta.dims:
        raise DimensionMismatch("theta and polynomials have different dimensions")
    dim = theta.dims.total
    pairs = [(m, v, theta[m, v]) for m in range(dim) for v in range(dim) if theta[m, v] != 0]
    half_i = 0.5j
    if theta.is_symbolic:
        import sympy

        half_i = sympy.I / 2
    layer = {(mf, mg): cf * cg for (mf, cf), (mg, cg) in itertools.product(f.terms.items(), g.terms.items())}
    out: dict[Monomial, object] = {}
    n = 0
    pref = 1
    while layer:
        for (mf, mg), c in layer.items():
            mono = tuple(x + y for x, y in zip(mf, mg))
            out[mono] = out.get(mono, 0) + pref * c
        n += 1
        pref = pref * half_i / n
        nxt: dict = {}
        for (mf, mg), c in layer.items():
            for m, v, t in pairs:
                a, mf2 = _derive(mf, m)
                if not a:
                    continue
                b, mg2 = _derive(mg, v)
                if not b:
                    continue
                key = (mf2, mg2)
                nxt[key] = nxt.get(key, 0) + t * a * b * c
        layer = {k: c for k, c in nxt.items() if not _is_zero(c)}
    return PolySymbol(f.dims, out)


@dataclass(frozen=True)
class MultiPointSymbol:
    """Plane waves at distinct points ``x_a`` with a common prefactor ``exp(i*phase)``."""

    labels: tuple[int, ...]
    factors: tuple[PlaneWaveSymbol, ...]
    phase: float = 0.0
    prefactor: complex = 1.0

    @property
    def value(self) -> complex:
        return self.prefactor * cmath.exp(1j * self.phase)


def twisted_product(
    theta: ThetaMatrix,
    factors: Sequence[PlaneWaveSymbol],
    labels: Sequence[int] | None = None,
) -> MultiPointSymbol:
    if not factors:
        raise ValueError("twisted product needs at least one factor")
    labels = tuple(range(1, len(factors) + 1)) if labels is None else tuple(labels)
    if len(labels) != len(factors):
        raise ValueError("one label per factor")
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate point labels in {labels}")
    total = 0.0
    for a, b in itertools.combinations(range(len(factors)), 2):
        total += wedge(theta, factors[a].momentum, factors[b].momentum)
    return MultiPointSymbol(labels, tuple(factors), phase=-total / 2)


def moyal_bracket(theta: ThetaMatrix, f, g):
    """``f * g - g * f`` for two plane waves or two polynomials.

    The plane-wave bracket is a single plane wave with coefficient
    ``-2i sin(w/2)`` (times the input coefficients) and zero phase.
    """
    if isinstance(f, PlaneWaveSymbol) and isinstance(g, PlaneWaveSymbol):
        fg = star_plane(theta, f, g)
        gf = star_plane(theta, g, f)
        return PlaneWaveSymbol(fg.value - gf.value, fg.momentum)
    if isinstance(f, PolySymbol) and isinstance(g, PolySymbol):
        return star_poly(theta, f, g) - star_poly(theta, g, f)
    raise TypeError("moyal_bracket needs two plane waves or two polynomials")


def star_chain(theta: ThetaMatrix, symbols: Iterable):
    """Left-folded star product of a sequence of symbols of one class."""
    it = iter(symbols)
    acc = next(it)
    op = star_plane if isinstance(acc, PlaneWaveSymbol) else star_poly
    for s in it:
        acc = op(theta, acc, s)
    return acc
