"""Time the rewriting engine against the truncated-matrix oracle by word length.

    python scripts/oracle_benchmark.py --max-len 6 --theta0 0.3
"""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

import numpy as np

from ncqft.fock import ModeLattice, TwistedFockMatrices, all_words, vev
from ncqft.kinematics import SpacetimeDims, ThetaMatrix


@dataclass
class BenchConfig:
    n_modes: int = 4
    max_len: int = 6
    truncation: int = 4
    theta0: float = 0.3
    seed: int = 0


def run(cfg: BenchConfig):
    dims = SpacetimeDims(1, 2)
    lattice = ModeLattice.random(dims, cfg.n_modes, np.random.default_rng(cfg.seed))
    theta = ThetaMatrix.canonical(dims, cfg.theta0)
    t = time.perf_counter()
    oracle = TwistedFockMatrices(theta, lattice, cfg.truncation)
    build = time.perf_counter() - t
    print(f"oracle: dim {oracle.dim}, built in {build:.3f} s")
    print(f"{'len':>3} {'words':>8} {'rewrite s':>10} {'matrix s':>10} {'max dev':>10}")
    for L in range(cfg.max_len + 1):
        words = list(all_words(cfg.n_modes, L))
        t0 = time.perf_counter()
        a = [vev(theta, lattice, w) for w in words]
        t1 = time.perf_counter()
        b = [oracle.vev(w) for w in words]
        t2 = time.perf_counter()
        dev = max(abs(x - y) for x, y in zip(a, b))
        print(f"{L:>3} {len(words):>8} {t1 - t0:>10.3f} {t2 - t1:>10.3f} {dev:>10.2e}")


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n-modes", type=int, default=4)
    p.add_argument("--max-len", type=int, default=6)
    p.add_argument("--truncation", type=int, default=4)
    p.add_argument("--theta0", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)
    a = p.parse_args(argv)
    run(BenchConfig(a.n_modes, a.max_len, a.truncation, a.theta0, a.seed))


if __name__ == "__main__":
    main()
