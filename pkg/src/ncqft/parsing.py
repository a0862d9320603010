"""Tiny grammars for the command line.

Star expressions::

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*          # '*' is the star product
    factor := 'pw(' coeff ';' k0, k1, ... ')'
            | 'poly(' polynomial in x0, x1, ... ')'
            | '(' expr ')'

Inside ``poly(...)`` ordinary arithmetic applies (``*`` is the pointwise
product, ``^`` or ``**`` a power, ``i`` the imaginary unit).

Fock words: whitespace separated letters ``a+(k2)`` / ``a-(k0)``; the number is
the 0-based mode index (``k`` optional).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .fock import ANNIHILATE, CREATE, Generator
from .kinematics import Momentum, SpacetimeDims, ThetaMatrix
from .star import PlaneWaveSymbol, PolySymbol, star_plane, star_poly


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass
class PlaneWaveSum:
    """Linear combination of plane waves (sums are not closed in the plane-wave class)."""

    terms: list[PlaneWaveSymbol]


def parse_complex(text: str, position: int = 0) -> complex:
    t = text.strip().replace(" ", "")
    t = re.sub(r"(?<![0-9.])i", "1i", t).replace("i", "j")
    try:
        return complex(t)
    except ValueError:
        raise ParseError(f"bad complex number {text.strip()!r}", position) from None


class _StarParser:
    def __init__(self, text: str, dims: SpacetimeDims, theta: ThetaMatrix):
        self.s = text
        self.pos = 0
        self.dims = dims
        self.theta = theta

    def error(self, msg):
        raise ParseError(msg, self.pos)

    def skip(self):
        while self.pos < len(self.s) and self.s[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.s[self.pos] if self.pos < len(self.s) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def parse(self):
        if not self.s.strip():
            self.error("empty expression")
        value = self.expr()
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return value

    def expr(self):
        value = self.term()
        while self.peek() in ("+", "-"):
            op = self.s[self.pos]
            self.pos += 1
            rhs = self.term()
            value = _combine(value, rhs, op, self)
        return value

    def term(self):
        value = self.factor()
        while self.peek() == "*":
            self.pos += 1
            rhs = self.factor()
            value = _star(self.theta, value, rhs, self)
        return value

    def factor(self):
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            value = self.expr()
            self.expect(")")
            return value
        for name in ("pw", "poly"):
            if self.s.startswith(name + "(", self.pos):
                start = self.pos
                self.pos += len(name) + 1
                body_start = self.pos
                end = self._matching_paren()
                body = self.s[body_start:end]
                self.pos = end + 1
                if name == "pw":
                    return PlaneWaveSum([self._plane_wave(body, body_start)])
                return self._poly(body, start)
        self.error("expected pw(...), poly(...) or '('")

    def _matching_paren(self) -> int:
        depth = 1
        i = self.pos
        while i < len(self.s):
            if self.s[i] == "(":
                depth += 1
            elif self.s[i] == ")":
                depth -= 1
                if depth == 0:
                    return i
            i += 1
        self.error("unbalanced parenthesis")

    def _plane_wave(self, body: str, offset: int) -> PlaneWaveSymbol:
        if ";" not in body:
            raise ParseError("pw needs 'coeff; k0, k1, ...'", offset)
        coeff_txt, mom_txt = body.split(";", 1)
        coeff = parse_complex(coeff_txt, offset)
        try:
            comps = [float(x) for x in mom_txt.split(",")]
        except ValueError:
            raise ParseError(f"bad momentum {mom_txt.strip()!r}", offset + len(coeff_txt) + 1) from None
        if len(comps) != self.dims.total:
            raise ParseError(f"momentum needs {self.dims.total} components, got {len(comps)}", offset)
        return PlaneWaveSymbol(coeff, Momentum(self.dims, comps))

    def _poly(self, body: str, offset: int) -> PolySymbol:
        import sympy

        names = [f"x{k}" for k in range(self.dims.total)]
        symbols = sympy.symbols(names)
        local = dict(zip(names, symbols))
        local["i"] = sympy.I
        local["I"] = sympy.I
        try:
            expr = sympy.sympify(body, locals=local, convert_xor=True)
            poly = sympy.Poly(sympy.expand(expr), *symbols)
        except (sympy.SympifyError, sympy.PolynomialError, SyntaxError, TypeError) as exc:
            raise ParseError(f"bad polynomial {body!r}: {exc}", offset) from None
        terms = {}
        for mono, c in poly.terms():
            terms[mono] = c if self.theta.is_symbolic else complex(c)
        return PolySymbol(self.dims, terms)


def _star(theta, a, b, parser):
    if isinstance(a, PolySymbol) and isinstance(b, PolySymbol):
        return star_poly(theta, a, b)
    if isinstance(a, PlaneWaveSum) and isinstance(b, PlaneWaveSum):
        return PlaneWaveSum([star_plane(theta, f, g) for f in a.terms for g in b.terms])
    parser.error("cannot mix plane waves and polynomials")


def _combine(a, b, op, parser):
    if isinstance(a, PolySymbol) and isinstance(b, PolySymbol):
        return a + b if op == "+" else a - b
    if isinstance(a, PlaneWaveSum) and isinstance(b, PlaneWaveSum):
        rhs = b.terms if op == "+" else [t.scaled(-1) for t in b.terms]
        return PlaneWaveSum(a.terms + rhs)
    parser.error("cannot mix plane waves and polynomials")


def parse_star_expression(text: str, dims: SpacetimeDims, theta: ThetaMatrix):
    """Evaluate a star expression; returns a ``PolySymbol`` or a ``PlaneWaveSum``."""
    return _StarParser(text, dims, theta).parse()


_LETTER = re.compile(r"a([+-])\(\s*k?(\d+)\s*\)")


def parse_word(text: str, n_modes: int | None = None) -> tuple[Generator, ...]:
    letters = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _LETTER.match(text, pos)
        if not m:
            raise ParseError("expected a+(k<i>) or a-(k<i>)", pos)
        mode = int(m.group(2))
        if n_modes is not None and mode >= n_modes:
            raise ParseError(f"mode {mode} outside lattice of {n_modes} modes", pos)
        letters.append(Generator(CREATE if m.group(1) == "+" else ANNIHILATE, mode))
        pos = m.end()
    return tuple(letters)


def format_word(letters) -> str:
    return " ".join(f"a{'+' if g.kind == CREATE else '-'}(k{g.mode})" for g in letters) or "1"


# --- rendering --------------------------------------------------------------


def format_complex(z, precision: int = 12) -> str:
    if not isinstance(z, (int, float, complex)):
        return _format_sympy(z)
    z = complex(z)
    re_, im = round(z.real, precision), round(z.imag, precision)
    re_ = 0.0 if re_ == 0 else re_
    im = 0.0 if im == 0 else im
    if im == 0:
        return f"{re_:.{precision}g}"
    if re_ == 0:
        return f"{im:.{precision}g}i"
    sign = "+" if im > 0 else "-"
    return f"{re_:.{precision}g}{sign}{abs(im):.{precision}g}i"


def _format_sympy(expr) -> str:
    import sympy

    expr = sympy.nsimplify(expr, rational=False) if expr.has(sympy.Float) else expr
    return str(expr).replace("I", "i")


def format_poly(p: PolySymbol, precision: int = 12) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for mono in sorted(p.terms, key=lambda m: (-sum(m), tuple(-a for a in m))):
        c = p.terms[mono]
        factors = []
        for k, a in enumerate(mono):
            if a == 1:
                factors.append(f"x{k}")
            elif a > 1:
                factors.append(f"x{k}^{a}")
        coeff = format_complex(c, precision)
        if factors and coeff == "1":
            parts.append("*".join(factors))
        else:
            if factors and ("+" in coeff[1:] or "-" in coeff[1:]):
                coeff = f"({coeff})"
            parts.append("*".join([coeff, *factors]))
    return " + ".join(parts)


def format_plane_wave(pw: PlaneWaveSymbol, precision: int = 12) -> str:
    comps = ",".join(f"{x:g}" for x in pw.momentum.components)
    return f"pw({format_complex(pw.coeff, precision)}; {comps})"
