"""Twisted oscillator algebra on a finite mode lattice.

Two independent routes to vacuum expectation values:

* a rewriting system driven by the deformed exchange relations

      a-(k) a+(q) = exp(-i w(k,q)) a+(q) a-(k) + exp(-(i/2) w(k,q)) delta_kq
      a±(k) a±(q) = exp(+i w(k,q)) a±(q) a±(k)

  with ``w`` the wedge of the on-shell momenta of the two modes;
* explicit matrices on the truncated Fock space, where the twisted generators
  are ordinary ladder operators dressed by a total-momentum dependent phase.

Rewriting never touches floating point phases: each word carries its phase as
an integer combination of pairwise wedges ``w(k_i, k_j)`` (``i < j``), which is
exponentiated only when a lattice and a theta are supplied.  The delta term's
phase is ``w(k, k) = 0`` on the diagonal, so every coefficient stays integral.
"""

from __future__ import annotations

import cmath
import functools
import itertools
from dataclasses import dataclass
from math import comb
from typing import Iterable, NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

from .kinematics import (
    DimensionMismatch,
    Momentum,
    SpacetimeDims,
    ThetaMatrix,
    on_shell_energy,
    wedge,
)

CREATE = +1
ANNIHILATE = -1

# (2pi)^{d+l} box volume; the continuum delta(k - q) becomes BOX_DELTA_NORM * kronecker
BOX_DELTA_NORM = 1.0


class Generator(NamedTuple):
    kind: int  # CREATE or ANNIHILATE
    mode: int

    @property
    def key(self):
        return (0 if self.kind == CREATE else 1, self.mode)

    def dagger(self) -> Generator:
        return Generator(-self.kind, self.mode)

    def __str__(self):
        return f"a{'+' if self.kind == CREATE else '-'}({self.mode})"


def a_plus(mode: int) -> Generator:
    return Generator(CREATE, mode)


def a_minus(mode: int) -> Generator:
    return Generator(ANNIHILATE, mode)


@dataclass(frozen=True, eq=False)
class ModeLattice:
    """Finite list of distinct spatial momenta of a single scalar of mass ``mass``."""

    dims: SpacetimeDims
    modes: tuple[tuple[float, ...], ...]
    mass: float = 1.0

    def __post_init__(self):
        modes = tuple(tuple(float(x) for x in m) for m in self.modes)
        for m in modes:
            if len(m) != self.dims.spatial:
                raise DimensionMismatch(f"mode {m} must have d + l = {self.dims.spatial} components")
        if len(set(modes)) != len(modes):
            raise ValueError("lattice modes must be pairwise distinct")
        if self.mass < 0:
            raise ValueError("mass must be non-negative")
        object.__setattr__(self, "modes", modes)

    def __len__(self):
        return len(self.modes)

    def __eq__(self, other):
        return (
            isinstance(other, ModeLattice)
            and (self.dims, self.modes, self.mass) == (other.dims, other.modes, other.mass)
        )

    def __hash__(self):
        return hash((self.dims, self.modes, self.mass))

    def energy(self, i: int) -> float:
        return on_shell_energy(self.mass, self.modes[i])

    def momentum(self, i: int, sign: int = 1) -> Momentum:
        """On-shell 4-momentum of mode ``i``; ``sign=-1`` negates the whole vector."""
        p = Momentum.on_shell(self.dims, self.modes[i], self.mass)
        return p if sign > 0 else -p

    def index_of(self, spatial, tol: float = 1e-12) -> int:
        spatial = np.asarray(spatial, dtype=float)
        for i, m in enumerate(self.modes):
            if np.allclose(spatial, m, rtol=0, atol=tol):
                return i
        raise OffLatticeError(f"momentum {spatial.tolist()} is not on the mode lattice")

    def wedge_matrix(self, theta: ThetaMatrix) -> np.ndarray:
        """``W[i, j] = wedge(theta, k_i, k_j)`` on on-shell 4-momenta."""
        if theta.dims != self.dims:
            raise DimensionMismatch("theta and lattice dimensions differ")
        return _wedge_matrix(theta, self)

    @classmethod
    def random(cls, dims: SpacetimeDims, n_modes: int, rng: np.random.Generator, mass: float = 1.0, scale: float = 1.0):
        modes = [tuple(rng.normal(scale=scale, size=dims.spatial)) for _ in range(n_modes)]
        return cls(dims, tuple(modes), mass)


@functools.lru_cache(maxsize=256)
def _wedge_matrix(theta: ThetaMatrix, lattice: ModeLattice) -> np.ndarray:
    moms = [lattice.momentum(i) for i in range(len(lattice))]
    W = np.array([[wedge(theta, p, q) for q in moms] for p in moms], dtype=float)
    W.setflags(write=False)
    return W


class OffLatticeError(ValueError):
    pass


class CanonicalWordError(ValueError):
    """``rewrite_step`` called on a word that is already normal ordered."""


class TruncationError(ValueError):
    pass


# --- exact phase arithmetic -------------------------------------------------
# A phase is a sorted tuple of ((i, j), c) with i < j, meaning sum c * w(k_i, k_j).

Phase = tuple


def pair_phase(k: int, q: int, sign: int = 1) -> Phase:
    """Phase ``sign * w(k, q)``."""
    if k == q:
        return ()
    if k < q:
        return (((k, q), sign),)
    return (((q, k), -sign),)


def add_phases(a: Phase, b: Phase) -> Phase:
    if not a:
        return b
    if not b:
        return a
    acc = dict(a)
    for pair, c in b:
        acc[pair] = acc.get(pair, 0) + c
    return tuple(sorted((p, c) for p, c in acc.items() if c))


def phase_value(phase: Phase, W: np.ndarray) -> float:
    return float(sum(c * W[i, j] for (i, j), c in phase))


# --- words ------------------------------------------------------------------


@dataclass(frozen=True)
class FockWord:
    """``scalar * exp(i * phase) * letters``."""

    scalar: complex
    letters: tuple[Generator, ...]
    phase: Phase = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(Generator(*g) for g in self.letters))

    def phase_accum(self, W: np.ndarray) -> float:
        return phase_value(self.phase, W)

    def is_canonical(self) -> bool:
        return disordered_positions(self.letters) == []

    def value(self, W: np.ndarray) -> complex:
        return self.scalar * cmath.exp(1j * self.phase_accum(W))

    def __str__(self):
        body = " ".join(map(str, self.letters)) or "1"
        ph = " + ".join(f"{c}*w{i}{j}" for (i, j), c in self.phase) or "0"
        return f"({self.scalar}) exp(i[{ph}]) {body}"


class FockSum:
    """Sum of words with like terms merged.

    Terms are keyed by ``(letters, phase)``; two terms with the same letters
    but different exact phases stay separate until evaluated numerically with
    :meth:`collect`.
    """

    __slots__ = ("_terms",)

    def __init__(self, words: Iterable[FockWord] = ()):
        terms: dict[tuple, complex] = {}
        for w in words:
            key = (w.letters, w.phase)
            terms[key] = terms.get(key, 0) + w.scalar
        self._terms = {k: c for k, c in terms.items() if c != 0}

    @classmethod
    def of(cls, letters: Sequence, scalar: complex = 1) -> FockSum:
        return cls([FockWord(scalar, tuple(letters))])

    @property
    def words(self) -> list[FockWord]:
        return [FockWord(c, letters, ph) for (letters, ph), c in self._terms.items()]

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self.words)

    def __add__(self, other: FockSum) -> FockSum:
        return FockSum(self.words + other.words)

    def __eq__(self, other):
        return isinstance(other, FockSum) and self._terms == other._terms

    def is_canonical(self) -> bool:
        return all(not disordered_positions(letters) for letters, _ in self._terms)

    def collect(self, W: np.ndarray) -> dict[tuple[Generator, ...], complex]:
        """Numerical coefficients keyed by letter sequence alone."""
        out: dict[tuple, complex] = {}
        for (letters, ph), c in self._terms.items():
            out[letters] = out.get(letters, 0) + c * cmath.exp(1j * phase_value(ph, W))
        return out

    def vacuum_terms(self) -> list[FockWord]:
        return [w for w in self.words if not w.letters]

    def __str__(self):
        return " + ".join(str(w) for w in self.words) or "0"


def disordered_positions(letters: Sequence[Generator]) -> list[int]:
    return [i for i in range(len(letters) - 1) if letters[i].key > letters[i + 1].key]


def inversion_count(letters: Sequence[Generator]) -> int:
    return sum(1 for a, b in itertools.combinations(letters, 2) if a.key > b.key)


def _apply_rule(letters: tuple, pos: int):
    """Rewrite the disordered pair at ``pos``; yields ``(new_letters, phase)``."""
    x, y = letters[pos], letters[pos + 1]
    head, tail = letters[:pos], letters[pos + 2 :]
    swapped = head + (y, x) + tail
    if x.kind == ANNIHILATE and y.kind == CREATE:
        yield swapped, pair_phase(x.mode, y.mode, -1)
        if x.mode == y.mode:
            # delta term, phase -(1/2) w(k, k) = 0
            yield head + tail, ()
    else:
        yield swapped, pair_phase(x.mode, y.mode, +1)


def rewrite_step(word: FockWord, strategy: str = "leftmost") -> FockSum:
    positions = disordered_positions(word.letters)
    if not positions:
        raise CanonicalWordError(f"word {word} is already normal ordered")
    pos = _pick(positions, strategy)
    return FockSum(
        FockWord(word.scalar * (BOX_DELTA_NORM if len(new) < len(word.letters) else 1), new, add_phases(word.phase, ph))
        for new, ph in _apply_rule(word.letters, pos)
    )


def _pick(positions: list[int], strategy: str) -> int:
    if strategy == "leftmost":
        return positions[0]
    if strategy == "rightmost":
        return positions[-1]
    raise ValueError(f"unknown strategy {strategy!r}")


@functools.lru_cache(maxsize=1 << 19)
def _normal_form(letters: tuple, strategy: str) -> tuple:
    """Canonical expansion of a bare word: tuple of ``((letters, phase), multiplicity)``."""
    positions = disordered_positions(letters)
    if not positions:
        return (((letters, ()), 1),)
    pos = _pick(positions, strategy)
    acc: dict = {}
    for new, ph in _apply_rule(letters, pos):
        factor = BOX_DELTA_NORM if len(new) < len(letters) else 1
        for (canon, ph2), m in _normal_form(new, strategy):
            key = (canon, add_phases(ph, ph2))
            acc[key] = acc.get(key, 0) + factor * m
    return tuple((k, m) for k, m in acc.items() if m)


def normal_order(fsum: FockSum | FockWord | Sequence, strategy: str = "leftmost") -> FockSum:
    """Fully normal-ordered form.

    Every rewrite removes at least one inversion (a swap removes exactly one,
    a contraction drops two letters), so the recursion terminates.
    """
    fsum = as_fock_sum(fsum)
    out = []
    for word in fsum.words:
        for (canon, ph), m in _normal_form(word.letters, strategy):
            out.append(FockWord(word.scalar * m, canon, add_phases(word.phase, ph)))
    return FockSum(out)


def as_fock_sum(obj) -> FockSum:
    if isinstance(obj, FockSum):
        return obj
    if isinstance(obj, FockWord):
        return FockSum([obj])
    return FockSum.of(tuple(Generator(*g) for g in obj))


def vev(theta: ThetaMatrix, lattice: ModeLattice, fsum, strategy: str = "leftmost") -> complex:
    """``<0| fsum |0>`` by normal ordering; only the empty word survives."""
    W = lattice.wedge_matrix(theta)
    total = 0j
    for word in as_fock_sum(fsum).words:
        for (canon, ph), m in _normal_form(word.letters, strategy):
            if not canon:
                total += word.scalar * m * cmath.exp(1j * phase_value(add_phases(word.phase, ph), W))
    return total


# --- matrix oracle ----------------------------------------------------------


class TwistedFockMatrices:
    """Dressed ladder operators on the Fock space with total occupation ``<= N``.

    ``a+(k) = b_k^dag exp(+(i/2) w(k, P))`` and ``a-(k) = b_k exp(-(i/2) w(k, P))``
    where ``P`` is the total-momentum operator (diagonal in the number basis).
    """

    def __init__(self, theta: ThetaMatrix, lattice: ModeLattice, N: int = 4):
        if N < 1:
            raise TruncationError("truncation must be >= 1")
        self.theta = theta
        self.lattice = lattice
        self.N = N
        M = len(lattice)
        self.basis = [
            occ for total in range(N + 1) for occ in _occupations(M, total)
        ]
        assert len(self.basis) == comb(N + M, M)
        self.index = {occ: i for i, occ in enumerate(self.basis)}
        self.occupation = np.array([sum(o) for o in self.basis])
        W = lattice.wedge_matrix(theta)
        occ = np.array(self.basis, dtype=float).reshape(len(self.basis), M)
        # wedge(k, P) for every basis state: P = sum_j n_j k_j
        self._wkP = occ @ W.T  # shape (dim, M)
        self.create = [self._dressed(k, CREATE) for k in range(M)]
        self.annihilate = [self._dressed(k, ANNIHILATE) for k in range(M)]
        self._bras: dict = {}
        self._kets: dict = {}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def _ladder(self, k: int) -> sp.csr_matrix:
        rows, cols, vals = [], [], []
        for j, occ in enumerate(self.basis):
            if occ[k] > 0:
                lower = occ[:k] + (occ[k] - 1,) + occ[k + 1 :]
                rows.append(self.index[lower])
                cols.append(j)
                vals.append(np.sqrt(occ[k]))
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.dim, self.dim))

    def _dressed(self, k: int, kind: int) -> sp.csr_matrix:
        b = self._ladder(k)
        op = b.T.tocsr() if kind == CREATE else b
        dressing = sp.diags(np.exp(kind * 0.5j * self._wkP[:, k]))
        return (op @ dressing).tocsr()

    def matrix(self, g: Generator) -> sp.csr_matrix:
        g = Generator(*g)
        return self.create[g.mode] if g.kind == CREATE else self.annihilate[g.mode]

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v

    def ket(self, letters: Sequence[Generator]) -> np.ndarray:
        v = self.vacuum()
        for g in reversed(letters):
            v = self.matrix(g) @ v
        return v

    def bra(self, letters: Sequence[Generator]) -> np.ndarray:
        """Row vector ``<0| letters``."""
        v = self.vacuum()
        for g in letters:
            v = self.matrix(g).T @ v
        return v

    def vev(self, letters: Sequence[Generator]) -> complex:
        letters = tuple(Generator(*g) for g in letters)
        if len(letters) > 2 * self.N:
            raise TruncationError(f"word of length {len(letters)} needs N >= {(len(letters) + 1) // 2}")
        mid = len(letters) // 2
        return complex(self._cached(self._bras, letters[:mid], self.bra) @ self._cached(self._kets, letters[mid:], self.ket))

    @staticmethod
    def _cached(cache: dict, key: tuple, build):
        v = cache.get(key)
        if v is None:
            if len(cache) > 1 << 16:
                cache.clear()
            v = cache[key] = build(key)
        return v

    def relation_residuals(self) -> dict[str, float]:
        """Largest operator-norm residual of each exchange relation over all mode pairs.

        Residuals are restricted to the input states on which both sides are
        represented without hitting the truncation.
        """
        W = self.lattice.wedge_matrix(self.theta)
        M = len(self.lattice)
        ident = np.eye(self.dim)
        below = {s: self.occupation <= self.N - s for s in (0, 1, 2)}
        out = {"mixed": 0.0, "create": 0.0, "annihilate": 0.0}
        for k, q in itertools.product(range(M), repeat=2):
            w = W[k, q]
            am, ap = self.annihilate, self.create
            r = (am[k] @ ap[q]).toarray() - np.exp(-1j * w) * (ap[q] @ am[k]).toarray()
            if k == q:
                r = r - np.exp(-0.5j * w) * BOX_DELTA_NORM * ident
            out["mixed"] = max(out["mixed"], _opnorm(r[:, below[1]]))
            r = (ap[k] @ ap[q]).toarray() - np.exp(1j * w) * (ap[q] @ ap[k]).toarray()
            out["create"] = max(out["create"], _opnorm(r[:, below[2]]))
            r = (am[k] @ am[q]).toarray() - np.exp(1j * w) * (am[q] @ am[k]).toarray()
            out["annihilate"] = max(out["annihilate"], _opnorm(r[:, below[0]]))
        return out


def _opnorm(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, ord=2))


def _occupations(M: int, total: int):
    if M == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _occupations(M - 1, total - first):
            yield (first, *rest)


@functools.lru_cache(maxsize=32)
def _oracle(theta: ThetaMatrix, lattice: ModeLattice, N: int) -> TwistedFockMatrices:
    return TwistedFockMatrices(theta, lattice, N)


def matrix_oracle_vev(theta: ThetaMatrix, lattice: ModeLattice, N: int, word: Sequence) -> complex:
    """Vacuum matrix element of ``word`` on the Fock space truncated at ``N`` particles.

    Exact for words of length ``<= 2N``: a component pushed above ``N`` would
    need more than ``N`` annihilators to return to the vacuum.
    """
    return _oracle(theta, lattice, N).vev(word)


def all_words(n_modes: int, length: int):
    letters = [Generator(kind, m) for kind in (CREATE, ANNIHILATE) for m in range(n_modes)]
    return itertools.product(letters, repeat=length)


def random_word(rng: np.random.Generator, n_modes: int, length: int) -> tuple[Generator, ...]:
    kinds = rng.choice([CREATE, ANNIHILATE], size=length)
    modes = rng.integers(0, n_modes, size=length)
    return tuple(Generator(int(k), int(m)) for k, m in zip(kinds, modes))
