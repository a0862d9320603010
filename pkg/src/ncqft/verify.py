"""Property suites run by ``ncqft verify`` and by the acceptance tests."""

from __future__ import annotations

import itertools
import warnings
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import fock
from .correlators import FieldPoint, WightmanSpec, green_star_momentum, pairing_formula, wightman_star_momentum
from .fock import (
    ModeLattice,
    TwistedFockMatrices,
    inversion_count,
    normal_order,
    random_word,
    rewrite_step,
    vev,
)
from .haag import amplitude_coincidence_check, random_process, random_theory_pair
from .kinematics import Momentum, SpacetimeDims, ThetaMatrix
from .lsz import (
    CoincidentMomentumWarning,
    ScatteringProcess,
    contact_core,
    fock_smatrix_element,
    free_core,
    lsz_amplitude,
    nc_phase_factor,
    twisted_contact_core,
)
from .star import PlaneWaveSymbol, PolySymbol, moyal_bracket, star_plane, star_poly, twisted_product

SUITES = ("star-assoc", "ccr-oracle", "pairing", "lsz-free", "haag-bound")


@dataclass
class PropertyResult:
    suite: str
    name: str
    max_deviation: float
    passed: bool
    checked: int
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.suite}/{self.name}: max deviation {self.max_deviation:.3e} over {self.checked} checks {self.detail}".rstrip()

    def as_dict(self) -> dict:
        return asdict(self)


def _result(suite, name, devs, tol, detail="", exact=False) -> PropertyResult:
    devs = list(devs)
    worst = max(devs, default=0.0)
    passed = worst == 0.0 if exact else worst < tol
    return PropertyResult(suite, name, float(worst), bool(passed), len(devs), detail)


# --- random inputs ----------------------------------------------------------


def dyadic_momentum(dims: SpacetimeDims, rng: np.random.Generator, scale: int = 4) -> Momentum:
    """Random momentum on a 1/64 grid so that momentum sums are exact in binary64."""
    return Momentum(dims, rng.integers(-64 * scale, 64 * scale + 1, size=dims.total) / 64.0)


def random_plane_wave(dims, rng) -> PlaneWaveSymbol:
    c = complex(rng.normal(), rng.normal())
    return PlaneWaveSymbol(c, dyadic_momentum(dims, rng))


def random_poly(dims: SpacetimeDims, rng: np.random.Generator, max_degree: int = 4, n_terms: int = 4) -> PolySymbol:
    terms = {}
    for _ in range(n_terms):
        deg = int(rng.integers(0, max_degree + 1))
        mono = [0] * dims.total
        for _ in range(deg):
            mono[int(rng.integers(dims.total))] += 1
        terms[tuple(mono)] = complex(rng.normal(), rng.normal())
    return PolySymbol(dims, terms)


# --- suites -----------------------------------------------------------------


def star_suite(theta: ThetaMatrix, rng: np.random.Generator, tol: float = 1e-12, n_plane: int = 1000, n_poly: int = 200, max_degree: int = 4):
    dims = theta.dims
    suite = "star-assoc"
    out = []

    devs, mom_ok = [], True
    for _ in range(n_plane):
        f, g, h = (random_plane_wave(dims, rng) for _ in range(3))
        left = star_plane(theta, star_plane(theta, f, g), h)
        right = star_plane(theta, f, star_plane(theta, g, h))
        devs.append(abs(left.value - right.value))
        mom_ok &= left.momentum == right.momentum
    out.append(_result(suite, "plane-associativity", devs, tol, "" if mom_ok else "(momentum mismatch)"))
    out[-1].passed &= mom_ok

    devs = []
    for _ in range(n_poly):
        f, g, h = (random_poly(dims, rng, max_degree) for _ in range(3))
        left = star_poly(theta, star_poly(theta, f, g), h)
        right = star_poly(theta, f, star_poly(theta, g, h))
        scale = max(1.0, max((abs(c) for c in left.terms.values()), default=1.0))
        devs.append(left.max_abs_diff(right) / scale)
    out.append(_result(suite, "poly-associativity", devs, tol, "(relative to largest coefficient)"))

    devs = []
    nc = range(dims.nc_slice.start, dims.nc_slice.stop)
    for i, j in itertools.product(nc, nc):
        br = moyal_bracket(theta, PolySymbol.coordinate(dims, i), PolySymbol.coordinate(dims, j))
        expected = PolySymbol.constant(dims, 1j * theta[i, j])
        devs.append(br.max_abs_diff(expected) if br != expected else 0.0)
    out.append(_result(suite, "coordinate-commutator", devs, tol, "(exact)", exact=True))

    devs = []
    for _ in range(min(n_plane, 200)):
        f, g = random_plane_wave(dims, rng), random_plane_wave(dims, rng)
        a = np.conj(star_plane(theta, f, g).value)
        b = star_plane(theta, g.conjugate(), f.conjugate()).value
        devs.append(abs(a - b))
    out.append(_result(suite, "conjugation", devs, tol))

    devs = []
    for _ in range(min(n_plane, 200)):
        n = int(rng.integers(1, 6))
        waves = [random_plane_wave(dims, rng) for _ in range(n)]
        mp = twisted_product(theta, waves)
        pair_phase = sum(
            star_plane(theta, PlaneWaveSymbol(1, a.momentum), PlaneWaveSymbol(1, b.momentum)).phase
            for a, b in itertools.combinations(waves, 2)
        )
        devs.append(abs(mp.phase - pair_phase))
    out.append(_result(suite, "twist-phase-consistency", devs, tol))

    zero = ThetaMatrix.zero(dims)
    devs = []
    for _ in range(min(n_poly, 50)):
        f, g = random_poly(dims, rng, 3), random_poly(dims, rng, 3)
        x = rng.normal(size=dims.total)
        devs.append(abs(star_poly(zero, f, g)(x) - f(x) * g(x)))
    out.append(_result(suite, "commutative-limit", devs, 1e-9))
    return out


def ccr_suite(
    theta: ThetaMatrix,
    lattice: ModeLattice,
    rng: np.random.Generator,
    tol: float = 1e-12,
    N: int = 4,
    max_len: int = 6,
    n_random: int = 500,
    random_len: int = 8,
    n_confluence: int = 1000,
    confluence_len: int = 8,
):
    suite = "ccr-oracle"
    M = len(lattice)
    oracle = TwistedFockMatrices(theta, lattice, N)
    out = []
    res = oracle.relation_residuals()
    out.append(_result(suite, "matrix-relations", res.values(), tol, str({k: f"{v:.1e}" for k, v in res.items()})))

    devs = []
    for L in range(max_len + 1):
        for w in fock.all_words(M, L):
            devs.append(abs(vev(theta, lattice, w) - oracle.vev(w)))
    for _ in range(n_random):
        w = random_word(rng, M, random_len)
        devs.append(abs(vev(theta, lattice, w) - oracle.vev(w)))
    out.append(_result(suite, "vev-oracle-equivalence", devs, tol))

    W = lattice.wedge_matrix(theta)
    devs, phases_equal = [], True
    for _ in range(n_confluence):
        w = random_word(rng, M, int(rng.integers(0, confluence_len + 1)))
        left = normal_order(w, "leftmost").collect(W)
        right = normal_order(w, "rightmost").collect(W)
        keys = set(left) | set(right)
        devs.append(max((abs(left.get(k, 0) - right.get(k, 0)) for k in keys), default=0.0))
        # exact phase bookkeeping: identical term sets, not just equal values
        phases_equal &= normal_order(w, "leftmost") == normal_order(w, "rightmost")
    out.append(_result(suite, "confluence", devs, tol, "" if phases_equal else "(exact phases differ)"))
    out[-1].passed &= phases_equal

    bad = 0
    checked = 0
    for _ in range(200):
        w = fock.FockWord(1, random_word(rng, M, int(rng.integers(0, 13))))
        frontier = [w]
        while frontier:
            word = frontier.pop()
            if word.is_canonical():
                continue
            before = inversion_count(word.letters)
            for nxt in rewrite_step(word):
                checked += 1
                bad += inversion_count(nxt.letters) >= before
                frontier.append(nxt)
    out.append(PropertyResult(suite, "termination", float(bad), bad == 0, checked, "(inversion count strictly decreases)"))

    devs = []
    for _ in range(200):
        w = random_word(rng, M, int(rng.integers(0, 9)))
        flipped = tuple(g.dagger() for g in reversed(w))
        devs.append(abs(np.conj(vev(theta, lattice, w)) - vev(theta, lattice, flipped)))
    out.append(_result(suite, "hermiticity", devs, tol))
    return out


def pairing_suite(theta: ThetaMatrix, lattice: ModeLattice, rng: np.random.Generator, tol: float = 1e-12, max_n: int = 6):
    suite = "pairing"
    choices = [(s, m) for s in (1, -1) for m in range(len(lattice))]
    devs, coherence = [], []
    for n in range(2, max_n + 1, 2):
        for combo in itertools.product(choices, repeat=n):
            pts = tuple(FieldPoint(a + 1, m, s, rank=a + 1) for a, (s, m) in enumerate(combo))
            spec = WightmanSpec(pts, lattice, theta)
            wv = wightman_star_momentum(spec)
            devs.append(abs(wv - pairing_formula(spec)))
            if n <= 4:
                coherence.append(abs(green_star_momentum(spec) - wv))
    out = [_result(suite, "pairing-equivalence", devs, tol), _result(suite, "permutation-coherence", coherence, tol, exact=True)]

    zero = ThetaMatrix.zero(theta.dims)
    devs = []
    for m in range(len(lattice)):
        pts = (FieldPoint(1, m, -1), FieldPoint(2, m, +1))
        a = wightman_star_momentum(WightmanSpec(pts, lattice, theta))
        b = wightman_star_momentum(WightmanSpec(pts, lattice, zero))
        devs.append(abs(a - b))
    out.append(_result(suite, "two-point-theta-independence", devs, tol, exact=True))
    return out


def lsz_suite(theta: ThetaMatrix, lattice: ModeLattice, rng: np.random.Generator, tol: float = 1e-12, n_contact: int = 500):
    suite = "lsz-free"
    dims = theta.dims
    M = len(lattice)
    out = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CoincidentMomentumWarning)
        for n_out, n_in, name in ((1, 1, "free-closure-1to1"), (2, 2, "free-closure-2to2")):
            core = free_core(theta, lattice, n_out + n_in)
            devs = []
            for outs in itertools.product(range(M), repeat=n_out):
                for ins in itertools.product(range(M), repeat=n_in):
                    proc = ScatteringProcess.from_spatial(
                        dims, [lattice.modes[i] for i in ins], [lattice.modes[i] for i in outs], lattice.mass
                    )
                    devs.append(abs(lsz_amplitude(theta, proc, core) - fock_smatrix_element(theta, proc, lattice)))
            out.append(_result(suite, name, devs, tol))

    zero = ThetaMatrix.zero(dims)
    devs, unit = [], []
    for _ in range(n_contact):
        proc = random_process(dims, rng, 2, 2, lattice.mass)
        lam = complex(rng.normal(), rng.normal())
        core = contact_core(lam, 4)
        phase = nc_phase_factor(theta, proc)
        devs.append(abs(lsz_amplitude(theta, proc, core) - phase * lsz_amplitude(zero, proc, core)))
        unit.append(abs(abs(phase) - 1.0))
    out.append(_result(suite, "contact-phase-structure", devs, tol))
    out.append(_result(suite, "phase-unit-modulus", unit, tol))

    devs = []
    for _ in range(min(n_contact, 200)):
        proc = random_process(dims, rng, 3, 1, lattice.mass)
        core = twisted_contact_core(theta, 1.0, 4)
        a = int(rng.integers(0, 2))
        ins = list(proc.in_momenta)
        ins[a], ins[a + 1] = ins[a + 1], ins[a]
        swapped = ScatteringProcess(tuple(ins), proc.out_momenta, proc.mass)
        devs.append(abs(lsz_amplitude(theta, proc, core) - lsz_amplitude(theta, swapped, core)))
    out.append(_result(suite, "incoming-exchange-invariance", devs, tol))

    devs = []
    for _ in range(min(n_contact, 100)):
        spatial = np.zeros(dims.spatial)
        spatial[: dims.d] = rng.normal(size=dims.d)
        proc = ScatteringProcess.from_spatial(dims, [spatial], [spatial * 0.5], lattice.mass)
        devs.append(abs(nc_phase_factor(theta, proc) - 1.0))
    out.append(_result(suite, "commutative-momenta-trivial-phase", devs, tol, exact=True))
    return out


def haag_suite(rng: np.random.Generator, tol: float = 1e-12, n_pairs: int = 100, ds=(1, 2, 3), theta_scale: float = 1.0):
    suite = "haag-bound"
    devs, consistent, sharp = [], True, []
    checked = 0
    for t in range(n_pairs):
        dims = SpacetimeDims(ds[t % len(ds)], 2)
        theta = ThetaMatrix.random(dims, rng, theta_scale)
        pair = random_theory_pair(dims, rng)
        bound = dims.commutative_bound
        for n_total in range(1, bound + 1):
            for n_in in range(n_total + 1):
                proc = random_process(dims, rng, n_in, n_total - n_in)
                rep = amplitude_coincidence_check(theta, pair, proc, tol)
                devs.append(rep.deviation)
                consistent &= rep.consistent
                checked += 1
        proc = random_process(dims, rng, 1, bound)
        rep = amplitude_coincidence_check(theta, pair, proc, tol)
        sharp.append(not rep.equal)
    out = [_result(suite, "coincidence-below-bound", devs, tol)]
    out[-1].passed &= consistent
    out.append(PropertyResult(suite, "sharp-above-bound", float(sum(not s for s in sharp)), all(sharp), len(sharp), "(mock differs at d+2 legs)"))
    return out


def run_suite(name: str, theta: ThetaMatrix, lattice: ModeLattice, tol: float = 1e-12, seed: int = 0, quick: bool = True):
    """Run a named suite; ``quick`` shrinks sample sizes for interactive use."""
    rng = np.random.default_rng(seed)
    runners: dict[str, Callable[[], list[PropertyResult]]] = {
        "star-assoc": lambda: star_suite(theta, rng, tol, *((200, 20) if quick else (1000, 200))),
        "ccr-oracle": lambda: ccr_suite(
            theta, lattice, rng, tol, N=4, max_len=4 if quick else 6, n_random=100 if quick else 500,
            n_confluence=200 if quick else 1000,
        ),
        "pairing": lambda: pairing_suite(theta, _first_modes(lattice, 3), rng, tol, 4 if quick else 6),
        "lsz-free": lambda: lsz_suite(theta, lattice, rng, tol, 100 if quick else 500),
        "haag-bound": lambda: haag_suite(rng, tol, 20 if quick else 100),
    }
    if name == "all":
        return [r for key in SUITES for r in runners[key]()]
    if name not in runners:
        raise KeyError(name)
    return runners[name]()


def _first_modes(lattice: ModeLattice, n: int) -> ModeLattice:
    return ModeLattice(lattice.dims, lattice.modes[:n], lattice.mass)
