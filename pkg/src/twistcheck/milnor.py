"""Weighted homogeneous polynomials, Milnor numbers and fiber counts.

Variables are ``z0, z1, ...``.  Counting conventions follow the twist
formula: a polynomial in ``n + 1`` variables of degree ``k`` gives
``k (k-1)^n`` twists, ``(k-1)^n`` per fiber.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, prod
from typing import Dict, List, Optional, Sequence, Tuple

import sympy


MAX_VARIABLES = 1000


class PolyError(ValueError):
    def __init__(self, message: str, column: int = 0):
        super().__init__(f"column {column}: {message}" if column else message)
        self.message = message
        self.column = column


@dataclass(frozen=True)
class Poly:
    """Collected polynomial: sorted (exponents, coefficient) pairs."""

    nvars: int
    terms: Tuple[Tuple[Tuple[int, ...], Fraction], ...]

    @classmethod
    def from_dict(cls, nvars: int, coeffs: Dict[Tuple[int, ...], Fraction]) -> "Poly":
        terms = tuple(sorted(((e, Fraction(c)) for e, c in coeffs.items() if c != 0), reverse=True))
        return cls(nvars, terms)

    def __len__(self):
        return len(self.terms)

    def monomials(self) -> List[Tuple[int, ...]]:
        return [e for e, _ in self.terms]


@dataclass(frozen=True)
class WeightData:
    weights: Tuple[Fraction, ...]
    degree: Fraction

    @classmethod
    def of(cls, weights: Sequence, degree) -> "WeightData":
        return cls(tuple(Fraction(w) for w in weights), Fraction(degree))

    def normalized(self) -> "WeightData":
        """Scale to coprime positive integers."""
        vals = list(self.weights) + [self.degree]
        den = 1
        for v in vals:
            den = den * v.denominator // gcd(den, v.denominator)
        ints = [int(v * den) for v in vals]
        g = 0
        for x in ints:
            g = gcd(g, x)
        g = g or 1
        return WeightData.of([x // g for x in ints[:-1]], ints[-1] // g)


# -- parsing -------------------------------------------------------------------

_TOK = re.compile(r"\s*(?:(?P<var>z(?P<idx>[0-9]+))|(?P<int>[0-9]+)|(?P<op>[-+*^])|(?P<name>[A-Za-z_][A-Za-z0-9_]*))")


def _tokens(text: str):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOK.match(text, pos)
        if not m:
            col = pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise PolyError(f"unexpected character {text[col - 1]!r}", col)
        col = m.start(m.lastgroup) + 1
        if m.group("name"):
            raise PolyError(f"unknown variable {m.group('name')!r}", col)
        if m.group("var"):
            idx = int(m.group("idx"))
            if idx > MAX_VARIABLES:
                raise PolyError(f"variable index {idx} is too large (limit {MAX_VARIABLES})", col)
            out.append(("var", idx, col))
        elif m.group("int"):
            out.append(("int", int(m.group("int")), col))
        else:
            out.append((m.group("op"), None, col))
        pos = m.end()
    out.append(("end", None, len(text) + 1))
    return out


def parse_poly(text, nvars: Optional[int] = None) -> Poly:
    """Parse ``"z0^3 + 2*z1*z2 - 5"`` into a collected :class:`Poly`."""
    if isinstance(text, (bytes, bytearray)):
        text = bytes(text).decode("utf-8", errors="replace")
    toks = _tokens(text)
    i = 0

    def peek():
        return toks[i]

    def expect(kind):
        nonlocal i
        t = toks[i]
        if t[0] != kind:
            want = {"int": "an integer", "var": "a variable"}.get(kind, repr(kind))
            got = "end of input" if t[0] == "end" else repr(t[1] if t[1] is not None else t[0])
            raise PolyError(f"expected {want}, found {got}", t[2])
        i += 1
        return t

    def factors(exps: Dict[int, int]) -> None:
        nonlocal i
        while True:
            v = expect("var")
            e = 1
            if peek()[0] == "^":
                i += 1
                e = expect("int")[1]
            exps[v[1]] = exps.get(v[1], 0) + e
            if peek()[0] != "*":
                return
            i += 1

    def term(sign: int) -> Tuple[Dict[int, int], int]:
        nonlocal i
        exps: Dict[int, int] = {}
        t = peek()
        if t[0] == "int":
            i += 1
            if peek()[0] == "*":
                i += 1
                factors(exps)
            return exps, sign * t[1]
        if t[0] == "var":
            factors(exps)
            return exps, sign
        got = "end of input" if t[0] == "end" else repr(t[0])
        raise PolyError(f"expected a term, found {got}", t[2])

    if peek()[0] == "end":
        raise PolyError("empty polynomial", 1)
    sign = 1
    if peek()[0] in "+-":
        sign = -1 if peek()[0] == "-" else 1
        i += 1
    terms = [term(sign)]
    while peek()[0] != "end":
        t = peek()
        if t[0] not in "+-":
            raise PolyError(f"expected '+' or '-', found {t[1] if t[1] is not None else t[0]!r}", t[2])
        i += 1
        terms.append(term(-1 if t[0] == "-" else 1))

    used = max((v for ex, _ in terms for v in ex), default=-1) + 1
    n = used if nvars is None else nvars
    if n < used:
        raise PolyError(f"variable z{used - 1} exceeds nvars = {n}")
    coeffs: Dict[Tuple[int, ...], Fraction] = {}
    for ex, c in terms:
        key = tuple(ex.get(v, 0) for v in range(n))
        coeffs[key] = coeffs.get(key, Fraction(0)) + c
    return Poly.from_dict(n, coeffs)


def format_poly(p: Poly) -> str:
    if not p.terms:
        return "0"
    parts = []
    for k, (exps, c) in enumerate(p.terms):
        factors = [f"z{v}" + (f"^{e}" if e != 1 else "") for v, e in enumerate(exps) if e]
        mag = abs(c)
        mag_s = str(mag.numerator) if mag.denominator == 1 else str(mag)
        if not factors:
            body = mag_s
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = mag_s + "*" + "*".join(factors)
        if k == 0:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return " ".join(parts)


def brieskorn_pham(nvars: int, k: int) -> Poly:
    """z0^k + ... + z_{nvars-1}^k."""
    coeffs = {tuple(k if v == i else 0 for v in range(nvars)): Fraction(1) for i in range(nvars)}
    return Poly.from_dict(nvars, coeffs)


# -- weights -----------------------------------------------------------------

def check_weighted_homogeneous(p: Poly, w: WeightData) -> bool:
    if len(w.weights) != p.nvars:
        raise ValueError(f"{len(w.weights)} weights for {p.nvars} variables")
    return all(sum(wi * a for wi, a in zip(w.weights, e)) == w.degree for e in p.monomials())


def infer_weights(p: Poly) -> Optional[WeightData]:
    """Solve d = sum w_i a_i over the monomials.

    Returns None unless the solution is unique up to scale with all
    weights and the degree positive.
    """
    if not p.terms or p.nvars == 0:
        return None
    rows = [list(e) + [-1] for e in p.monomials()]
    null = sympy.Matrix(rows).nullspace()
    if len(null) != 1:
        return None
    v = [sympy.Rational(x) for x in null[0]]
    if v[-1] < 0:
        v = [-x for x in v]
    if any(x <= 0 for x in v):
        return None
    w = WeightData.of([Fraction(int(x.p), int(x.q)) for x in v[:-1]], Fraction(int(v[-1].p), int(v[-1].q)))
    return w.normalized()


def milnor_number(w: WeightData) -> int:
    """mu = prod (d - w_i) / w_i, required to be a nonnegative integer."""
    if w.degree <= 0 or any(x <= 0 for x in w.weights):
        raise ValueError("weights and degree must be positive")
    factors = [(w.degree - x) / x for x in w.weights]
    if any(f < 0 for f in factors):
        raise ValueError("a weight exceeds the degree")
    mu = prod(factors, start=Fraction(1))
    if mu.denominator != 1:
        raise ValueError(f"Milnor number {mu} is not an integer; not an isolated weighted homogeneous singularity")
    return int(mu)


# -- counts ------------------------------------------------------------------

def _check_nk(n: int, k: int) -> None:
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")


def twist_count(n: int, k: int) -> int:
    _check_nk(n, k)
    return k * (k - 1) ** n


def per_fiber_count(n: int, k: int) -> int:
    _check_nk(n, k)
    return (k - 1) ** n


def fiber_topology(k: int) -> Dict[str, int]:
    """Genus, boundary count, Euler characteristic and H_1 rank of F_{k,k}."""
    if k < 1:
        raise ValueError("need k >= 1")
    g = (k - 1) * (k - 2) // 2
    euler = 2 - 2 * g - k
    out = {"genus": g, "boundary": k, "euler": euler, "h1_rank": 2 * g + k - 1}
    mu = milnor_number(WeightData.of([1, 1], k))
    if euler != 1 - mu or out["h1_rank"] != mu:
        raise AssertionError(f"fiber topology disagrees with the Milnor number for k = {k}")
    return out


def fractional_powers(k: int) -> List[int]:
    """Divisors l of k; the l-th root twists by the angle 2 pi / l."""
    if k < 1:
        raise ValueError("need k >= 1")
    return [int(d) for d in sympy.divisors(k)]


def fractional_angles(k: int) -> List[Tuple[int, Fraction]]:
    """Each divisor with its twist angle as a fraction of a full turn."""
    return [(l, Fraction(1, l)) for l in fractional_powers(k)]
