"""Amplitude coincidence for two theories whose low-point Green functions agree.

If the ``s``-point functions of two theories coincide for every ``s <= d + 1``,
the reduction formula gives equal amplitudes for every process with
``m + n <= d + 1`` legs.  Above the bound nothing is implied.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .kinematics import Momentum, SpacetimeDims, ThetaMatrix
from .lsz import AmputatedGreenFn, ScatteringProcess, lsz_amplitude


class MissingGreenFunction(KeyError):
    pass


@dataclass(frozen=True)
class TheoryPair:
    theory_a: Mapping[int, AmputatedGreenFn]
    theory_b: Mapping[int, AmputatedGreenFn]
    coincidence_bound: int
    grid: tuple[tuple[Momentum, ...], ...] = field(default=(), repr=False)
    tol: float = 1e-12

    def __post_init__(self):
        for s in range(1, self.coincidence_bound + 1):
            a, b = self.theory_a.get(s), self.theory_b.get(s)
            if a is None or b is None:
                continue
            for momenta in self.grid:
                if len(momenta) < s:
                    continue
                args = momenta[:s]
                if abs(a(args) - b(args)) > self.tol:
                    raise ValueError(f"theories differ at s={s} <= bound {self.coincidence_bound}")

    @classmethod
    def for_dims(cls, dims: SpacetimeDims, theory_a, theory_b, grid=(), tol: float = 1e-12) -> TheoryPair:
        return cls(theory_a, theory_b, dims.commutative_bound, tuple(grid), tol)


@dataclass(frozen=True)
class CoincidenceReport:
    n_legs: int
    bound: int
    amplitude_a: complex
    amplitude_b: complex
    deviation: float
    equal: bool
    predicted_equal: bool

    @property
    def consistent(self) -> bool:
        """The one-directional implication ``n_legs <= bound  =>  equal``."""
        return self.equal or not self.predicted_equal


def amplitude_coincidence_check(
    theta: ThetaMatrix,
    pair: TheoryPair,
    process: ScatteringProcess,
    tol: float = 1e-12,
    normalization: str = "box",
) -> CoincidenceReport:
    n = process.n_legs
    try:
        ga, gb = pair.theory_a[n], pair.theory_b[n]
    except KeyError as exc:
        raise MissingGreenFunction(f"no {n}-point Green function in one of the theories") from exc
    amp_a = lsz_amplitude(theta, process, ga, normalization)
    amp_b = lsz_amplitude(theta, process, gb, normalization)
    dev = abs(amp_a - amp_b)
    scale = max(1.0, abs(amp_a), abs(amp_b))
    return CoincidenceReport(
        n_legs=n,
        bound=pair.coincidence_bound,
        amplitude_a=amp_a,
        amplitude_b=amp_b,
        deviation=dev,
        equal=dev <= tol * scale,
        predicted_equal=n <= pair.coincidence_bound,
    )


# --- mock theories ----------------------------------------------------------


def polynomial_core(coeffs: np.ndarray, n_legs: int, name: str = "poly") -> AmputatedGreenFn:
    """Smooth core ``c0 + sum_a (c1_a q_a^0 + c2_a |q_a|^2)`` with complex coefficients."""
    coeffs = np.asarray(coeffs, dtype=complex)

    def core(momenta):
        total = coeffs[0]
        for a, q in enumerate(momenta):
            total += coeffs[1 + 2 * a] * q.energy + coeffs[2 + 2 * a] * float(q.spatial @ q.spatial)
        return total

    return AmputatedGreenFn(core, n_legs, name=name)


def random_theory_pair(
    dims: SpacetimeDims,
    rng: np.random.Generator,
    max_legs: int | None = None,
    offset: complex = 0.5 + 0.25j,
    n_grid: int = 4,
    mass: float = 1.0,
) -> TheoryPair:
    """Two theories equal for ``s <= d + 1`` and shifted by ``offset`` above the bound."""
    bound = dims.commutative_bound
    max_legs = bound + 1 if max_legs is None else max_legs
    theory_a, theory_b = {}, {}
    for s in range(1, max_legs + 1):
        c = rng.normal(size=1 + 2 * s) + 1j * rng.normal(size=1 + 2 * s)
        theory_a[s] = polynomial_core(c, s, name=f"A{s}")
        if s <= bound:
            theory_b[s] = theory_a[s]
        else:
            shifted = c.copy()
            shifted[0] += offset
            theory_b[s] = polynomial_core(shifted, s, name=f"B{s}")
    grid = tuple(random_signed_legs(dims, rng, max_legs, mass) for _ in range(n_grid))
    return TheoryPair(theory_a, theory_b, bound, grid)


def random_signed_legs(dims: SpacetimeDims, rng: np.random.Generator, n: int, mass: float = 1.0) -> tuple[Momentum, ...]:
    return tuple(
        Momentum.on_shell(dims, rng.normal(size=dims.spatial), mass, sign=int(rng.choice([-1, 1])))
        for _ in range(n)
    )


def random_process(
    dims: SpacetimeDims, rng: np.random.Generator, n_in: int, n_out: int, mass: float = 1.0
) -> ScatteringProcess:
    return ScatteringProcess.from_spatial(
        dims,
        [rng.normal(size=dims.spatial) for _ in range(n_in)],
        [rng.normal(size=dims.spatial) for _ in range(n_out)],
        mass,
    )


def leg_splits(n_total: int):
    """All ``(n_in, n_out)`` with ``n_in + n_out = n_total``."""
    return [(m, n_total - m) for m in range(n_total + 1)]
