"""Spacetime split, noncommutativity matrix, momenta and the wedge pairing.

Coordinates are ordered ``(x0, x1, ..., xd, x_{d+1}, ..., x_{d+l})``: time first,
then ``d`` commutative spatial directions, then ``l`` noncommutative ones.
Metric signature is ``(+, -, ..., -)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np

TOL = 1e-12


class DomainError(ValueError):
    """Raised for arguments outside the physical domain (negative mass, ...)."""


class DimensionMismatch(ValueError):
    pass


class ConfigError(ValueError):
    """Invalid configuration file or theta matrix."""


@dataclass(frozen=True)
class SpacetimeDims:
    d: int
    l: int

    def __post_init__(self):
        if self.d < 0:
            raise ConfigError(f"d must be >= 0, got {self.d}")
        if self.l < 2 or self.l % 2:
            raise ConfigError(f"l must be even and >= 2, got {self.l}")

    @property
    def spatial(self) -> int:
        return self.d + self.l

    @property
    def total(self) -> int:
        return 1 + self.d + self.l

    @property
    def nc_slice(self) -> slice:
        return slice(1 + self.d, 1 + self.d + self.l)

    @property
    def commutative_bound(self) -> int:
        """Number of commuting coordinates including time, ``d + 1``."""
        return self.d + 1


def _is_symbolic(arr: np.ndarray) -> bool:
    return arr.dtype == object


class ThetaMatrix:
    """Full spacetime embedding of the antisymmetric noncommutativity matrix.

    Entries outside the ``l x l`` noncommutative block must vanish.  Entries are
    floats, or sympy expressions for symbolic evaluation (see :meth:`symbolic`).
    """

    __slots__ = ("dims", "_entries")

    def __init__(self, dims: SpacetimeDims, entries):
        arr = np.array(entries, dtype=object if _has_sympy(entries) else float)
        n = dims.total
        if arr.shape != (n, n):
            raise ConfigError(f"theta must be {n}x{n} for d={dims.d}, l={dims.l}, got {arr.shape}")
        if not _is_symbolic(arr):
            if not np.all(np.isfinite(arr)):
                raise ConfigError("theta entries must be finite reals")
            if not np.array_equal(arr, -arr.T):
                raise ConfigError("theta must be antisymmetric")
        else:
            import sympy

            for i in range(n):
                for j in range(n):
                    if sympy.simplify(arr[i, j] + arr[j, i]) != 0:
                        raise ConfigError("theta must be antisymmetric")
        mask = np.zeros((n, n), dtype=bool)
        mask[dims.nc_slice, dims.nc_slice] = True
        off = arr[~mask]
        if any(x != 0 for x in off):
            raise ConfigError(
                "theta has entries outside the noncommutative block; "
                "time-space and commutative-direction noncommutativity are not supported"
            )
        arr.setflags(write=False)
        self.dims = dims
        self._entries = arr

    @classmethod
    def from_block(cls, dims: SpacetimeDims, block) -> ThetaMatrix:
        blk = np.array(block, dtype=object if _has_sympy(block) else float)
        if blk.shape != (dims.l, dims.l):
            raise ConfigError(f"theta_block must be {dims.l}x{dims.l}, got {blk.shape}")
        full = np.zeros((dims.total, dims.total), dtype=blk.dtype)
        full[dims.nc_slice, dims.nc_slice] = blk
        return cls(dims, full)

    @classmethod
    def canonical(cls, dims: SpacetimeDims, theta0: float | Sequence[float]) -> ThetaMatrix:
        """Block-diagonal theta with ``[[0, t], [-t, 0]]`` blocks on consecutive nc pairs."""
        values = np.broadcast_to(np.asarray(theta0, dtype=float), (dims.l // 2,))
        block = np.zeros((dims.l, dims.l))
        for b, t in enumerate(values):
            block[2 * b, 2 * b + 1] = t
            block[2 * b + 1, 2 * b] = -t
        return cls.from_block(dims, block)

    @classmethod
    def zero(cls, dims: SpacetimeDims) -> ThetaMatrix:
        return cls(dims, np.zeros((dims.total, dims.total)))

    @classmethod
    def random(cls, dims: SpacetimeDims, rng: np.random.Generator, scale: float = 1.0) -> ThetaMatrix:
        a = rng.normal(scale=scale, size=(dims.l, dims.l))
        return cls.from_block(dims, np.triu(a, 1) - np.triu(a, 1).T)

    @classmethod
    def symbolic(cls, dims: SpacetimeDims) -> ThetaMatrix:
        """Theta with sympy symbols ``θij`` (spacetime indices) in the nc block."""
        import sympy

        n = dims.total
        arr = np.zeros((n, n), dtype=object)
        idx = range(dims.nc_slice.start, dims.nc_slice.stop)
        for i in idx:
            for j in idx:
                if i < j:
                    s = sympy.Symbol(f"θ{i}{j}", real=True)
                    arr[i, j] = s
                    arr[j, i] = -s
        return cls(dims, arr)

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def block(self) -> np.ndarray:
        s = self.dims.nc_slice
        return self._entries[s, s]

    @property
    def is_symbolic(self) -> bool:
        return _is_symbolic(self._entries)

    @property
    def is_zero(self) -> bool:
        return all(x == 0 for x in self._entries.ravel())

    def __getitem__(self, key):
        return self._entries[key]

    def __eq__(self, other):
        return (
            isinstance(other, ThetaMatrix)
            and self.dims == other.dims
            and np.array_equal(self._entries, other._entries)
        )

    def __hash__(self):
        return hash((self.dims, self._entries.tobytes() if not self.is_symbolic else str(self._entries)))

    def __repr__(self):
        return f"ThetaMatrix(d={self.dims.d}, l={self.dims.l}, block={self.block.tolist()})"


def _has_sympy(values) -> bool:
    try:
        import sympy
    except ImportError:  # pragma: no cover
        return False
    return any(isinstance(x, sympy.Basic) for x in np.asarray(values, dtype=object).ravel())


@dataclass(frozen=True, eq=False)
class Momentum:
    """Energy-momentum vector ``(p0, p_c..., p_nc...)`` with contravariant components."""

    dims: SpacetimeDims
    components: np.ndarray

    def __post_init__(self):
        comps = np.array(self.components, dtype=float)
        if comps.shape != (self.dims.total,):
            raise DimensionMismatch(f"momentum needs {self.dims.total} components, got {comps.shape}")
        comps.setflags(write=False)
        object.__setattr__(self, "components", comps)

    @classmethod
    def on_shell(cls, dims: SpacetimeDims, spatial, mass: float, sign: int = 1) -> Momentum:
        """Momentum on the upper (``sign=+1``) or lower (``sign=-1``) mass shell."""
        spatial = np.asarray(spatial, dtype=float)
        energy = on_shell_energy(mass, spatial)
        return cls(dims, np.concatenate([[sign * energy], spatial]))

    @property
    def energy(self) -> float:
        return float(self.components[0])

    @property
    def spatial(self) -> np.ndarray:
        return self.components[1:]

    @property
    def commutative_part(self) -> np.ndarray:
        return self.components[1 : 1 + self.dims.d]

    @property
    def noncommutative_part(self) -> np.ndarray:
        return self.components[self.dims.nc_slice]

    def square(self) -> float:
        """Minkowski square ``p0^2 - |p|^2``."""
        return float(self.components[0] ** 2 - self.spatial @ self.spatial)

    def is_on_shell(self, mass: float, tol: float = 1e-9) -> bool:
        return abs(abs(self.energy) - on_shell_energy(mass, self.spatial)) <= tol * max(1.0, abs(self.energy))

    def __neg__(self) -> Momentum:
        return Momentum(self.dims, -self.components)

    def __add__(self, other: Momentum) -> Momentum:
        _check_dims(self.dims, other.dims)
        return Momentum(self.dims, self.components + other.components)

    def __sub__(self, other: Momentum) -> Momentum:
        return self + (-other)

    def __mul__(self, scalar: float) -> Momentum:
        return Momentum(self.dims, scalar * self.components)

    __rmul__ = __mul__

    def __eq__(self, other):
        return (
            isinstance(other, Momentum)
            and self.dims == other.dims
            and np.array_equal(self.components, other.components)
        )

    def __hash__(self):
        return hash((self.dims, self.components.tobytes()))

    def __repr__(self):
        return f"Momentum({self.components.tolist()})"


def _check_dims(a: SpacetimeDims, b: SpacetimeDims):
    if a != b:
        raise DimensionMismatch(f"dimension mismatch: {a} vs {b}")


def on_shell_energy(mass: float, spatial) -> float:
    if mass < 0:
        raise DomainError(f"mass must be non-negative, got {mass}")
    spatial = np.asarray(spatial, dtype=float)
    return float(np.sqrt(spatial @ spatial + mass * mass))


def wedge(theta: ThetaMatrix, p: Momentum, q: Momentum):
    """Antisymmetric pairing ``sum_{mu,nu} theta^{mu nu} p_mu q_nu``.

    Only the noncommutative components contribute.  Returns a float, or a sympy
    expression when ``theta`` is symbolic.
    """
    _check_dims(theta.dims, p.dims)
    _check_dims(theta.dims, q.dims)
    s = theta.dims.nc_slice
    return _block_wedge(theta.block, p.components[s], q.components[s])


def _block_wedge(block, p, q):
    # sum over i < j of theta_ij (p_i q_j - p_j q_i): exactly antisymmetric in
    # floating point and exactly zero for p == q
    total = 0
    n = len(p)
    for i in range(n):
        for j in range(i + 1, n):
            t = block[i, j]
            if t != 0:
                total = total + t * (p[i] * q[j] - p[j] * q[i])
    return 0.0 if isinstance(total, int) else total


def wedge_spatial(theta: ThetaMatrix, p, q) -> float:
    """Wedge of two spatial (d+l) vectors; equal to :func:`wedge` of any momenta carrying them."""
    d = theta.dims.d
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != (theta.dims.spatial,) or q.shape != (theta.dims.spatial,):
        raise DimensionMismatch("spatial vectors must have d + l components")
    return _block_wedge(theta.block, p[d:], q[d:])


def load_config(path: str | Path) -> dict[str, Any]:
    """Read a JSON config; returns a dict with validated ``dims`` and ``theta``.

    Recognised keys: ``d``, ``l``, ``theta_block`` (row-major l x l) or ``theta``
    (full matrix), optional ``mass`` and ``modes`` (list of spatial vectors).
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    return parse_config(raw, source=str(path))


def parse_config(raw: dict[str, Any], source: str = "<config>") -> dict[str, Any]:
    try:
        dims = SpacetimeDims(int(raw["d"]), int(raw["l"]))
    except KeyError as exc:
        raise ConfigError(f"{source}: missing key {exc}") from exc
    if "theta" in raw:
        theta = ThetaMatrix(dims, raw["theta"])
    elif "theta_block" in raw:
        theta = ThetaMatrix.from_block(dims, raw["theta_block"])
    else:
        theta = ThetaMatrix.zero(dims)
    out = dict(raw)
    out["dims"] = dims
    out["theta"] = theta
    if "mass" in raw and float(raw["mass"]) < 0:
        raise ConfigError(f"{source}: mass must be non-negative")
    return out
