"""Noncommutative LSZ reduction over amputated momentum-space Green functions.

Green functions are stored as ``core x prod(external propagators)``.  The
``(p^2 - m^2)`` factors then cancel the propagators algebraically, so the
on-shell limit is exact and only the core is ever evaluated.
"""

from __future__ import annotations

import cmath
import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .correlators import FieldPoint, WightmanSpec, green_star_momentum
from .fock import ANNIHILATE, CREATE, Generator, ModeLattice, vev
from .kinematics import DimensionMismatch, Momentum, SpacetimeDims, ThetaMatrix, on_shell_energy, wedge

NORMALIZATIONS = ("box", "literal")


class OffShellError(ValueError):
    pass


class LegCountMismatch(ValueError):
    pass


class CoincidentMomentumWarning(UserWarning):
    """An incoming momentum equals an outgoing one; the reduction drops a term that is then nonzero."""


@dataclass(frozen=True)
class AmputatedGreenFn:
    """Amputated core of an ``n_legs``-point Green function.

    ``core`` receives the ordered list of signed 4-momenta (outgoing legs carry
    ``-p``, i.e. negative energy) and must be finite on shell.
    """

    core: Callable[[Sequence[Momentum]], complex]
    n_legs: int
    leg_masses: tuple[float, ...] = ()
    name: str = "core"

    def __call__(self, momenta: Sequence[Momentum]) -> complex:
        if len(momenta) != self.n_legs:
            raise LegCountMismatch(f"{self.name} takes {self.n_legs} legs, got {len(momenta)}")
        return complex(self.core(list(momenta)))


@dataclass(frozen=True)
class ScatteringProcess:
    """``m`` incoming and ``k`` outgoing on-shell particles of one mass."""

    in_momenta: tuple[Momentum, ...]
    out_momenta: tuple[Momentum, ...]
    mass: float

    def __post_init__(self):
        object.__setattr__(self, "in_momenta", tuple(self.in_momenta))
        object.__setattr__(self, "out_momenta", tuple(self.out_momenta))
        legs = self.in_momenta + self.out_momenta
        if not legs:
            raise ValueError("a process needs at least one leg")
        dims = legs[0].dims
        for p in legs:
            if p.dims != dims:
                raise DimensionMismatch("all legs must share dimensions")
            if p.energy <= 0 or not p.is_on_shell(self.mass):
                raise OffShellError(f"{p} is not on the upper mass shell for m={self.mass}")
        for p, q in itertools.product(self.in_momenta, self.out_momenta):
            if np.array_equal(p.spatial, q.spatial):
                warnings.warn(
                    f"incoming momentum {p.spatial.tolist()} equals an outgoing one",
                    CoincidentMomentumWarning,
                    stacklevel=3,
                )

    @classmethod
    def from_spatial(cls, dims: SpacetimeDims, in_spatial, out_spatial, mass: float) -> ScatteringProcess:
        return cls(
            tuple(Momentum.on_shell(dims, p, mass) for p in in_spatial),
            tuple(Momentum.on_shell(dims, p, mass) for p in out_spatial),
            mass,
        )

    @property
    def dims(self) -> SpacetimeDims:
        return (self.out_momenta + self.in_momenta)[0].dims

    @property
    def n_legs(self) -> int:
        return len(self.in_momenta) + len(self.out_momenta)

    def signed_legs(self) -> list[Momentum]:
        """``(-p_out_1, ..., -p_out_k, p_in_1, ..., p_in_m)``."""
        return [-p for p in self.out_momenta] + list(self.in_momenta)

    def core_arguments(self) -> list[Momentum]:
        """``(-p_out_1, ..., -p_out_k, p_in_m, ..., p_in_1)``: incoming legs reversed."""
        return [-p for p in self.out_momenta] + list(reversed(self.in_momenta))


def nc_phase_exponent(theta: ThetaMatrix, process: ScatteringProcess, sign: int = +1) -> float:
    """Real exponent ``sign * (1/2) sum_{a<b} w(P_a, P_b)`` over the signed legs."""
    legs = process.signed_legs()
    if theta.dims != legs[0].dims:
        raise DimensionMismatch("theta and process dimensions differ")
    return sign * 0.5 * sum(wedge(theta, a, b) for a, b in itertools.combinations(legs, 2))


def nc_phase_factor(theta: ThetaMatrix, process: ScatteringProcess, sign: int = +1) -> complex:
    return cmath.exp(1j * nc_phase_exponent(theta, process, sign))


def prefactor(dims: SpacetimeDims, n: int, normalization: str = "box") -> complex:
    if normalization == "box":
        return (1 / 1j) ** n
    if normalization == "literal":
        return (1 / (1j * (2 * math.pi) ** (dims.spatial / 2))) ** n
    raise ValueError(f"unknown normalization {normalization!r}; choose from {NORMALIZATIONS}")


def lsz_amplitude(
    theta: ThetaMatrix,
    process: ScatteringProcess,
    gfn: AmputatedGreenFn,
    normalization: str = "box",
    phase_sign: int = +1,
) -> complex:
    """``<0| a-_out ... a+_in |0>`` from the amputated Green function."""
    n = process.n_legs
    if gfn.n_legs != n:
        raise LegCountMismatch(f"process has {n} legs, Green function {gfn.n_legs}")
    legs = process.out_momenta + process.in_momenta
    kin = math.prod(1.0 / math.sqrt(2 * on_shell_energy(process.mass, p.spatial)) for p in legs)
    return (
        prefactor(process.dims, n, normalization)
        * nc_phase_factor(theta, process, phase_sign)
        * kin
        * gfn(process.core_arguments())
    )


def fock_smatrix_element(theta: ThetaMatrix, process: ScatteringProcess, lattice: ModeLattice | None = None) -> complex:
    """Free-theory ``<0| a-(p_out_1) ... a-(p_out_k) a+(p_in_1) ... a+(p_in_m) |0>``."""
    if lattice is None:
        lattice = lattice_for(process)
    word = [Generator(ANNIHILATE, lattice.index_of(p.spatial)) for p in process.out_momenta]
    word += [Generator(CREATE, lattice.index_of(p.spatial)) for p in process.in_momenta]
    return vev(theta, lattice, tuple(word))


def lattice_for(process: ScatteringProcess) -> ModeLattice:
    """Smallest lattice holding every momentum of the process."""
    modes = []
    for p in process.out_momenta + process.in_momenta:
        t = tuple(float(x) for x in p.spatial)
        if t not in modes:
            modes.append(t)
    return ModeLattice(process.dims, tuple(modes), process.mass)


# --- cores ------------------------------------------------------------------


def contact_core(coupling: complex, n_legs: int) -> AmputatedGreenFn:
    return AmputatedGreenFn(lambda momenta: coupling, n_legs, name=f"contact:{coupling}")


def twisted_contact_core(theta: ThetaMatrix, coupling: complex, n_legs: int) -> AmputatedGreenFn:
    """Contact core carrying the exchange statistics of the twisted algebra.

    ``core(..., q_a, q_b, ...) = exp(i w(q_a, q_b)) core(..., q_b, q_a, ...)``.
    """

    def core(momenta):
        return coupling * cmath.exp(0.5j * sum(wedge(theta, a, b) for a, b in itertools.combinations(momenta, 2)))

    return AmputatedGreenFn(core, n_legs, name=f"twisted-contact:{coupling}")


def free_core(theta: ThetaMatrix, lattice: ModeLattice, n_legs: int) -> AmputatedGreenFn:
    """Amputated free-field star-Green function on a mode lattice (box normalization).

    Each argument selects a field component by the sign of its energy; the
    time-ordering sector places the points in argument order, first argument
    latest.  The residue normalization ``i sqrt(2 omega)`` per leg, together
    with the field's own ``1/sqrt(2 omega)``, gives ``i (2 omega)`` per leg.
    """

    def core(momenta):
        pts = []
        for a, q in enumerate(momenta):
            sign = CREATE if q.energy > 0 else ANNIHILATE
            mode = lattice.index_of(sign * q.spatial)
            pts.append(FieldPoint(a + 1, mode, sign, rank=a + 1))
        amput = math.prod(1j * 2 * lattice.energy(p.mode) for p in pts)
        return amput * green_star_momentum(WightmanSpec(tuple(pts), lattice, theta))

    return AmputatedGreenFn(core, n_legs, (lattice.mass,) * n_legs, name=f"free{n_legs}pt")


def free2pt_core(theta: ThetaMatrix, lattice: ModeLattice) -> AmputatedGreenFn:
    return free_core(theta, lattice, 2)
