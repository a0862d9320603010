"""Independent reference implementations used as test oracles.

Nothing here imports the rewriting engine, the sparse-matrix oracle or the star
engine; states are dicts from occupation tuples to amplitudes and products are
computed with sympy or plain complex arithmetic.
"""

from __future__ import annotations

import cmath
import itertools
import math

import numpy as np
import sympy


def plain_wedge(block, p_nc, q_nc) -> float:
    return float(np.asarray(p_nc) @ np.asarray(block, dtype=float) @ np.asarray(q_nc))


def pointwise_poly_product(terms_f: dict, terms_g: dict, n_vars: int) -> dict:
    xs = sympy.symbols(f"x0:{n_vars}")
    f = sum(complex(c) * sympy.prod(x**a for x, a in zip(xs, m)) for m, c in terms_f.items())
    g = sum(complex(c) * sympy.prod(x**a for x, a in zip(xs, m)) for m, c in terms_g.items())
    poly = sympy.Poly(sympy.expand(f * g), *xs)
    return {m: complex(c) for m, c in poly.terms()}


def moyal_first_order_bracket(block, i: int, j: int) -> complex:
    """``x^i * x^j - x^j * x^i`` from the first-order Moyal term alone (higher orders vanish)."""
    return 1j * float(block[i][j])


def dict_vev(word, mode_wedge=None) -> complex:
    """``<0| word |0>`` acting letter by letter on occupation dicts.

    ``word`` is a sequence of ``(kind, mode)`` with kind +1 (creation) or -1.
    Without ``mode_wedge`` the operators are plain bosonic ladders.  With the
    antisymmetric matrix ``W[k][q]`` the creation operator is dressed as
    ``b^dag exp(+(i/2) w(k, P))`` and the annihilator as ``b exp(-(i/2) w(k, P))``.
    """
    n_modes = 1 + max((m for _, m in word), default=0)
    if mode_wedge is not None:
        n_modes = max(n_modes, len(mode_wedge))
    state = {(0,) * n_modes: 1.0 + 0j}
    for kind, k in reversed(list(word)):
        new = {}
        for occ, amp in state.items():
            if mode_wedge is not None:
                wkP = sum(occ[j] * mode_wedge[k][j] for j in range(n_modes))
                amp = amp * cmath.exp(kind * 0.5j * wkP)
            if kind > 0:
                nxt = occ[:k] + (occ[k] + 1,) + occ[k + 1 :]
                factor = math.sqrt(occ[k] + 1)
            else:
                if occ[k] == 0:
                    continue
                nxt = occ[:k] + (occ[k] - 1,) + occ[k + 1 :]
                factor = math.sqrt(occ[k])
            new[nxt] = new.get(nxt, 0) + factor * amp
        state = new
        if not state:
            return 0j
    return complex(state.get((0,) * n_modes, 0))


def plain_wightman(points, energies) -> complex:
    """Commutative free-field momentum Wightman value of ``(sign, mode)`` components."""
    word = [(s, m) for s, m in points]
    norm = math.prod(1 / math.sqrt(2 * energies[m]) for _, m in points)
    return norm * dict_vev(word)


def sympy_moyal(theta_entries, f_terms: dict, g_terms: dict, n_vars: int) -> dict:
    """Moyal product by brute force over index tuples with ``sympy.diff``."""
    xs = sympy.symbols(f"x0:{n_vars}")
    f = sympy.Add(*(complex(c) * sympy.prod(x**a for x, a in zip(xs, m)) for m, c in f_terms.items()))
    g = sympy.Add(*(complex(c) * sympy.prod(x**a for x, a in zip(xs, m)) for m, c in g_terms.items()))
    pairs = [(m, v) for m in range(n_vars) for v in range(n_vars) if theta_entries[m][v] != 0]
    total = f * g
    n_max = min(sympy.Poly(f, *xs).total_degree(), sympy.Poly(g, *xs).total_degree())
    for n in range(1, n_max + 1):
        acc = 0
        for combo in itertools.product(pairs, repeat=n):
            coeff = math.prod(float(theta_entries[m][v]) for m, v in combo)
            df, dg = f, g
            for m, v in combo:
                df = sympy.diff(df, xs[m])
                dg = sympy.diff(dg, xs[v])
            acc += coeff * df * dg
        total += (0.5j) ** n / math.factorial(n) * acc
    poly = sympy.Poly(sympy.expand(total), *xs)
    return {m: complex(c) for m, c in poly.terms()}
