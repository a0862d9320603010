"""Free-field star-Wightman and time-ordered star-Green functions in momentum space.

Each field point selects one Fourier component of the free field: ``sign=+1``
picks the creation part ``e^{+ikx} a+(k)``, ``sign=-1`` the annihilation part
``e^{-ikx} a-(k)``.  The momentum flowing at the point is ``sign * k`` (the full
on-shell 4-vector), and the twist between points ``a < b`` multiplies the
product by ``exp(-(i/2) w(k_a, k_b))``.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fock import ANNIHILATE, CREATE, FockWord, Generator, ModeLattice, vev
from .kinematics import ThetaMatrix


@dataclass(frozen=True)
class FieldPoint:
    label: int
    mode: int
    sign: int
    rank: int | None = None  # position in decreasing-time order, 1 = latest

    def __post_init__(self):
        if self.sign not in (CREATE, ANNIHILATE):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")

    @property
    def generator(self) -> Generator:
        return Generator(self.sign, self.mode)


@dataclass(frozen=True)
class WightmanSpec:
    points: tuple[FieldPoint, ...]
    lattice: ModeLattice
    theta: ThetaMatrix

    def __post_init__(self):
        pts = tuple(self.points)
        if not pts:
            raise ValueError("need at least one field point")
        labels = [p.label for p in pts]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate point labels {labels}")
        for p in pts:
            if not 0 <= p.mode < len(self.lattice):
                raise ValueError(f"mode {p.mode} not on the lattice")
        ranks = [p.rank for p in pts]
        if all(r is not None for r in ranks) and sorted(ranks) != list(range(1, len(pts) + 1)):
            raise ValueError(f"time ranks must be a permutation of 1..{len(pts)} (equal times are not supported), got {ranks}")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return len(self.points)

    def _W(self) -> np.ndarray:
        return self.lattice.wedge_matrix(self.theta)


def points_from_momenta(lattice: ModeLattice, signed_momenta, ranks: Sequence[int] | None = None) -> tuple[FieldPoint, ...]:
    """Build field points from ``(sign, spatial_momentum)`` pairs; off-lattice momenta raise."""
    pts = []
    for a, (sign, spatial) in enumerate(signed_momenta):
        rank = None if ranks is None else ranks[a]
        pts.append(FieldPoint(a + 1, lattice.index_of(spatial), int(sign), rank))
    return tuple(pts)


def _signed_wedge(W: np.ndarray, a: FieldPoint, b: FieldPoint) -> float:
    return a.sign * b.sign * W[a.mode, b.mode]


def twist_exponent(spec: WightmanSpec) -> float:
    """``-(1/2) sum_{a<b} w(k_a, k_b)`` over point labels."""
    W = spec._W()
    pts = sorted(spec.points, key=lambda p: p.label)
    return -0.5 * sum(_signed_wedge(W, a, b) for a, b in itertools.combinations(pts, 2))


def _normalization(spec: WightmanSpec) -> float:
    return math.prod(1.0 / math.sqrt(2 * spec.lattice.energy(p.mode)) for p in spec.points)


def _evaluate_sequence(spec: WightmanSpec, sequence: Sequence[FieldPoint]) -> complex:
    pref = _normalization(spec) * cmath.exp(1j * twist_exponent(spec))
    word = FockWord(pref, tuple(p.generator for p in sequence))
    return vev(spec.theta, spec.lattice, word)


def wightman_star_momentum(spec: WightmanSpec) -> complex:
    """Momentum-space ``<0| phi(x_1) * ... * phi(x_n) |0>`` via the rewriting engine."""
    if spec.n % 2:
        return 0j
    return _evaluate_sequence(spec, sorted(spec.points, key=lambda p: p.label))


def green_star_momentum(spec: WightmanSpec) -> complex:
    """Time-ordered star product in the sector fixed by the point ranks.

    The factors are reordered by increasing rank (latest time leftmost); the
    twist phase stays attached to the point labels.
    """
    if any(p.rank is None for p in spec.points):
        raise ValueError("every point needs a time rank")
    if spec.n % 2:
        return 0j
    return _evaluate_sequence(spec, sorted(spec.points, key=lambda p: p.rank))


def matchings(n: int):
    """All perfect matchings of ``range(n)`` as lists of pairs ``(a, b)``, ``a < b``."""
    if n % 2 == 0:
        yield from _matchings_of(list(range(n)))


def _matchings_of(items: list[int]):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for j in rest:
        remaining = [r for r in rest if r != j]
        for m in _matchings_of(remaining):
            yield [(first, j), *m]


def pairing_formula(spec: WightmanSpec) -> complex:
    """Closed-form sum over contractions.

    A contraction pairs an annihilator with a creator of the same mode standing
    to its right, weighted ``1/(2 omega)``.  Bringing partners together costs a
    factor ``exp(i w(k_p, k_q))`` for every crossing of two contractions
    ``a_p < a_q < b_p < b_q``; nested and disjoint pairs cost nothing.
    """
    n = spec.n
    if n % 2:
        return 0j
    pts = sorted(spec.points, key=lambda p: p.label)
    W = spec._W()
    total = 0j
    for m in matchings(n):
        if not all(
            pts[a].sign == ANNIHILATE and pts[b].sign == CREATE and pts[a].mode == pts[b].mode for a, b in m
        ):
            continue
        weight = math.prod(1.0 / (2 * spec.lattice.energy(pts[a].mode)) for a, _ in m)
        crossing = 0.0
        for (a1, b1), (a2, b2) in itertools.combinations(sorted(m), 2):
            if a1 < a2 < b1 < b2:
                crossing += W[pts[a1].mode, pts[a2].mode]
        total += weight * cmath.exp(1j * crossing)
    return total * cmath.exp(1j * twist_exponent(spec))
