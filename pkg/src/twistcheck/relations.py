"""Relation catalogue and the two-engine verification pipeline."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from . import homology as hom
from . import surfaces
from .dsl import Comp, Expr, Name, Power, comp, format_expr, names, parse_expr
from .surfaces import SurfaceError, SurfaceModel, UnsupportedLevel
from .words import GroupoidMorphism, first_difference, power

PASS, FAIL, NOT_RUN, UNSUPPORTED = "pass", "fail", "not-run", "unsupported"


class BindError(ValueError):
    def __init__(self, name: Name, surface: str):
        super().__init__(f"line {name.line}, column {name.column}: unknown twist {name.name!r} on {surface}")
        self.name = name


@dataclass(frozen=True)
class RelationStatement:
    surface: str
    lhs: Expr
    rhs: Expr
    engine: str = "both"
    bindings: Dict[str, str] = field(default_factory=dict, compare=False)
    label: str = field(default="", compare=False)
    source: str = field(default="", compare=False)  # script text, if any

    @property
    def text(self) -> str:
        return f"{format_expr(self.lhs)} == {format_expr(self.rhs)}"

    def to_script(self) -> str:
        lines = [f"surface {self.surface}"]
        lines += [f"let {k} = {v}" for k, v in self.bindings.items()]
        tag = "" if self.engine == "both" else f" [engine={self.engine}]"
        lines.append(f"assert {self.text}{tag}")
        return "\n".join(lines) + "\n"


@dataclass
class VerificationReport:
    statement: RelationStatement
    homology: str = NOT_RUN
    exact: str = NOT_RUN
    witness: str = ""
    detail: str = ""  # groupoid-level witness, shown at higher verbosity
    seconds: float = 0.0

    @property
    def refuted(self) -> bool:
        return FAIL in (self.homology, self.exact)

    @property
    def verdict(self) -> str:
        if self.refuted:
            return "refuted"
        if self.exact == PASS:
            return "verified"
        if self.homology == PASS:
            return "passed (necessary condition only)"
        return "not checked"

    def as_dict(self) -> dict:
        return {
            "surface": self.statement.surface,
            "statement": self.statement.text,
            "source": self.statement.source or self.statement.text,
            "homology": self.homology,
            "exact": self.exact,
            "verdict": self.verdict,
            "witness": self.witness,
            "seconds": round(self.seconds, 6),
        }


# -- binding -----------------------------------------------------------------

def resolve(name: Name, model: SurfaceModel, bindings: Optional[Dict[str, str]] = None) -> str:
    """Curve named by a twist symbol: binding, curve name, then ``D<curve>``."""
    n = name.name
    if bindings and n in bindings:
        n = bindings[n]
    if model.has_curve(n):
        return n
    if n.startswith("D") and model.has_curve(n[1:]):
        return n[1:]
    raise BindError(name, model.name)


def bind(expr: Expr, model: SurfaceModel, bindings: Optional[Dict[str, str]] = None) -> None:
    """Raise :class:`BindError` for the first name that does not resolve."""
    for n in names(expr):
        resolve(n, model, bindings)


def eval_exact(expr: Expr, model: SurfaceModel, bindings=None) -> GroupoidMorphism:
    if isinstance(expr, Name):
        return model.curve(resolve(expr, model, bindings)).twist
    if isinstance(expr, Comp):
        out = eval_exact(expr.factors[0], model, bindings)
        for f in expr.factors[1:]:
            out = out * eval_exact(f, model, bindings)
        return out
    return power(eval_exact(expr.base, model, bindings), expr.exp)


def eval_homology(expr: Expr, model: SurfaceModel, bindings=None) -> hom.Matrix:
    q = model.intersection_form
    if isinstance(expr, Name):
        return hom.transvection(model.curve(resolve(expr, model, bindings)).homology, q)
    if isinstance(expr, Comp):
        out = eval_homology(expr.factors[0], model, bindings)
        for f in expr.factors[1:]:
            out = hom.matmul(out, eval_homology(f, model, bindings))
        return out
    if isinstance(expr.base, Name):
        c = model.curve(resolve(expr.base, model, bindings)).homology
        return hom.transvection(c, q, expr.exp)
    return hom.matpow(eval_homology(expr.base, model, bindings), expr.exp)


def exact_equal(lhs: Expr, rhs: Expr, model: SurfaceModel, bindings=None) -> bool:
    return eval_exact(lhs, model, bindings) == eval_exact(rhs, model, bindings)


# -- verification ------------------------------------------------------------

def _surface_for(statement: RelationStatement, engine: str) -> SurfaceModel:
    level = "exact" if engine == "exact" else "homology"
    return surfaces.get(statement.surface, level)


def verify(statement: RelationStatement, engine: Optional[str] = None) -> VerificationReport:
    """Run the requested engine(s).

    ``both`` runs homology first and stops at a refutation there; the exact
    stage is reported as unsupported on homology-level surfaces.  Asking
    for ``exact`` alone on such a surface raises :class:`UnsupportedLevel`.
    """
    engine = engine or statement.engine or "both"
    if engine not in ("homology", "exact", "both"):
        raise ValueError(f"unknown engine {engine!r}")
    t0 = time.perf_counter()
    model = _surface_for(statement, engine)
    if engine == "exact" and model.level != "exact":
        raise UnsupportedLevel(f"{model.name} has no exact twist tables")
    bind(statement.lhs, model, statement.bindings)
    bind(statement.rhs, model, statement.bindings)
    rep = VerificationReport(statement)
    b = statement.bindings
    if engine in ("homology", "both"):
        left = eval_homology(statement.lhs, model, b)
        right = eval_homology(statement.rhs, model, b)
        diff = hom.first_difference(left, right)
        rep.homology = PASS if diff is None else FAIL
        if diff:
            j, a, c = diff
            rep.witness = f"on {model.homology_basis[j]}: lhs gives {list(a)}, rhs gives {list(c)}"
    if engine == "exact" or (engine == "both" and rep.homology == PASS):
        if model.level != "exact":
            rep.exact = UNSUPPORTED
        else:
            left = eval_exact(statement.lhs, model, b)
            right = eval_exact(statement.rhs, model, b)
            diff = first_difference(left, right)
            rep.exact = PASS if diff is None else FAIL
            if diff:
                edge, a, c = diff
                rep.witness = f"sides differ on generator {edge}"
                rep.detail = f"lhs: {edge} -> {a}; rhs: {edge} -> {c}"
    rep.seconds = time.perf_counter() - t0
    return rep


# -- catalogue ---------------------------------------------------------------

def _n(s: str) -> Name:
    return Name(s)


def _product(symbols: List[str]) -> Expr:
    return comp(*(_n(s) for s in symbols))


def _pow(e: Expr, k: int) -> Expr:
    return e if k == 1 else Power(e, k)


_CHAIN_BINDINGS = {
    1: ("annulus", {"D1": "core"}),
    2: ("S_1_1", {"D1": "a", "D2": "b", "Db": "d"}),
    3: ("S_1_2", {"D1": "a1", "D2": "a2", "D3": "a3"}),
}


def chain_relation(m: int, variant: str = "standard") -> RelationStatement:
    """Chain relation for m curves, bound to the chain's neighborhood.

    Even m: (D1...Dm)^(2m+2) == Db.  Odd m: (D1...Dm)^(m+1) == Db1 * Db2.
    ``squared_first`` uses D1^2 in place of D1 and exponent 2m or m.
    """
    if not isinstance(m, int) or m < 1:
        raise ValueError("chain_relation needs m >= 1")
    if variant not in ("standard", "squared_first"):
        raise ValueError(f"unknown chain variant {variant!r}")
    syms = [f"D{i}" for i in range(1, m + 1)]
    factors: List[Expr] = [_n(s) for s in syms]
    if variant == "squared_first":
        factors[0] = Power(factors[0], 2)
        exp = 2 * m if m % 2 == 0 else m
    else:
        exp = 2 * m + 2 if m % 2 == 0 else m + 1
    lhs = _pow(comp(*factors), exp)
    rhs = _n("Db") if m % 2 == 0 else _product(["Db1", "Db2"])
    if m in _CHAIN_BINDINGS:
        surface, bindings = _CHAIN_BINDINGS[m]
    else:
        g, b = (m // 2, 1) if m % 2 == 0 else ((m - 1) // 2, 2)
        surface, bindings = f"S_{g}_{b}", {}
    return RelationStatement(surface, lhs, rhs, bindings=dict(bindings), label=f"chain m={m} {variant}")


def _boundary_product(b: int) -> Expr:
    return _product([f"Db{j}" for j in range(1, b + 1)])


def star_relation() -> RelationStatement:
    """(Dg * Dp * Db * Dy)^3 == Db1 * Db2 * Db3 on S_1_3.

    The star curves alpha_1..alpha_3 and the central alpha are g, p, b, y.
    """
    return RelationStatement("S_1_3", Power(_product(["Dg", "Dp", "Db", "Dy"]), 3), _boundary_product(3), label="star")


def corollary_relation() -> RelationStatement:
    return RelationStatement("S_1_3", Power(_product(["Dr", "Dp", "Db", "Dg"]), 3), _boundary_product(3), label="corollary")


def hkp_relation(k: int, order: str = "monodromy") -> RelationStatement:
    """Phi^k == Db1 ... Dbk on F_{k,k}, with Phi the product of all D_{i,j}.

    ``typographic`` writes the columns j = k-1 .. 1 left to right, each as
    D_{1,j} ... D_{k-1,j}, exactly as the product is usually displayed.
    ``monodromy`` (the default) is the same product read in the opposite
    order, which is the one that holds under the rightmost-first convention.
    """
    if not isinstance(k, int) or k < 2:
        raise ValueError("hkp_relation needs k >= 2")
    syms = [f"D{i}_{j}" for j in range(k - 1, 0, -1) for i in range(1, k)]
    if order == "monodromy":
        syms.reverse()
    elif order != "typographic":
        raise ValueError(f"unknown order {order!r}")
    return RelationStatement(f"F_{k}_{k}", _pow(_product(syms), k), _boundary_product(k), label=f"hkp k={k} {order}")


def braid_check(surface, c1: str, c2: str, engine: str = "exact") -> VerificationReport:
    """Braid relation for declared i = 1, commutation for i = 0."""
    model = surfaces.get(surface) if isinstance(surface, str) else surface
    try:
        a, b = model.curve(c1), model.curve(c2)
    except KeyError as exc:
        raise SurfaceError(f"unknown curve {exc.args[0]!r} on {model.name}") from None
    if a.name == b.name:
        raise SurfaceError("braid_check needs two distinct curves")
    i = a.intersections.get(b.name)
    if i is None:
        raise SurfaceError(f"no declared intersection for {c1}, {c2}")
    x, y = _n("D" + a.name), _n("D" + b.name)
    if i == 0:
        st = RelationStatement(model.name, comp(x, y), comp(y, x), engine, label="commute")
    elif i == 1:
        st = RelationStatement(model.name, comp(x, y, x), comp(y, x, y), engine, label="braid")
    else:
        raise SurfaceError(f"declared intersection {i} is neither 0 nor 1")
    return verify(st, engine)


def from_assert(directive) -> RelationStatement:
    return RelationStatement(
        directive.surface, directive.lhs, directive.rhs, directive.engine or "both", source=directive.source
    )


def parse_relation(surface: str, text: str, engine: str = "both") -> RelationStatement:
    lhs, _, rhs = text.partition("==")
    return RelationStatement(surface, parse_expr(lhs), parse_expr(rhs), engine)


def mutations(statement: RelationStatement) -> Dict[str, RelationStatement]:
    """Systematic perturbations of the left side.

    exponent_up / exponent_down shift the outer power by one, drop_factor
    removes the last factor of the base product and invert_factor inverts
    its first factor.
    """
    lhs = statement.lhs
    base, exp = (lhs.base, lhs.exp) if isinstance(lhs, Power) else (lhs, 1)
    factors = list(base.factors) if isinstance(base, Comp) else [base]
    out = {
        "exponent_up": _pow_any(base, exp + 1),
        "exponent_down": _pow_any(base, exp - 1),
    }
    if len(factors) > 1:
        out["drop_factor"] = _pow_any(comp(*factors[:-1]), exp)
    first = factors[0]
    inv = first.base if isinstance(first, Power) and first.exp == -1 else Power(first, -1)
    out["invert_factor"] = _pow_any(comp(inv, *factors[1:]), exp)
    return {
        k: RelationStatement(statement.surface, v, statement.rhs, statement.engine, statement.bindings, f"{statement.label} {k}")
        for k, v in out.items()
    }


def _pow_any(e: Expr, k: int) -> Expr:
    return e if k == 1 else Power(e, k)


def catalogue() -> Dict[str, RelationStatement]:
    """Every shipped relation, keyed by a short id."""
    out = {
        "corollary": corollary_relation(),
        "star": star_relation(),
    }
    for m in (1, 2, 3):
        for v in ("standard", "squared_first"):
            out[f"chain{m}_{v}"] = chain_relation(m, v)
    for k in range(2, 7):
        out[f"hkp{k}"] = hkp_relation(k)
    return out
