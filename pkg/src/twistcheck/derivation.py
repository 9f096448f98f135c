"""Step checker for rewriting proofs between twist relations.

A derivation file is a relation script extended with::

    surface S_1_3
    initial <lhs> == <rhs>
    step <rule>(<args>): <lhs> == <rhs>
    final <lhs> == <rhs>          (optional; must match the last equation)
    note <free text>              (kept as metadata, never checked)

Rules:

``substitute(X == Y)``
    the lemma must pass the exact engine; the new equation is the old one
    with one occurrence of X replaced by Y.
``expand_power()`` / ``free_cancel()``
    purely formal: both sides agree with the previous ones as words in the
    free group on the twist symbols.
``conjugate_both_sides(w, central_rhs | verified_commutation)``
    the new sides are w * L * w' and either w * R * w' or R itself; the
    exact engine must confirm that w commutes with R.
``rewrite_rhs_central(w)``
    the old right side is w * R * w' for the new R, and w commutes with R.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from . import surfaces
from .dsl import (
    Comp,
    DslError,
    Expr,
    Name,
    Power,
    comp,
    flatten,
    format_expr,
    parse_equation,
    parse_expr,
    pow_,
)
from .relations import BindError, RelationStatement, bind, exact_equal, verify
from .surfaces import SurfaceError

RULES = ("substitute", "expand_power", "free_cancel", "conjugate_both_sides", "rewrite_rhs_central")
JUSTIFICATIONS = ("central_rhs", "verified_commutation")

Equation = Tuple[Expr, Expr]


@dataclass(frozen=True)
class Step:
    rule: str
    args: Tuple[str, ...]
    result: Equation
    line: int = 0


@dataclass
class DerivationScript:
    surface: str
    initial: Equation
    steps: List[Step] = field(default_factory=list)
    final: Optional[Equation] = None
    notes: List[str] = field(default_factory=list)


@dataclass(frozen=True)
class StepResult:
    index: int
    rule: str
    ok: bool
    message: str = ""


@dataclass
class DerivationReport:
    surface: str
    initial_ok: bool = False
    final_ok: bool = False
    final_matches: bool = True
    steps: List[StepResult] = field(default_factory=list)
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error and self.initial_ok and self.final_ok and self.final_matches and all(s.ok for s in self.steps)

    def first_violation(self) -> Optional[StepResult]:
        return next((s for s in self.steps if not s.ok), None)


def fmt_eq(eq: Equation) -> str:
    return f"{format_expr(eq[0])} == {format_expr(eq[1])}"


# -- parsing -------------------------------------------------------------------

_STEP = re.compile(r"step\s+([A-Za-z_]+)\s*\((.*?)\)\s*:(.*)$")


def _split_args(text: str) -> Tuple[str, ...]:
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch == "," and depth == 0:
            parts.append(cur.strip())
            cur = ""
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur += ch
    if cur.strip():
        parts.append(cur.strip())
    return tuple(parts)


def parse_derivation(text: str) -> DerivationScript:
    surface = None
    initial = None
    final = None
    steps: List[Step] = []
    notes: List[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped.startswith("note"):
            notes.append(stripped[4:].strip())
            continue
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        word = body.split(None, 1)[0]
        rest = body[len(word):].strip()
        col = raw.index(word) + len(word) + 2
        if word == "surface":
            surface = rest
        elif word in ("initial", "final"):
            eq = parse_equation(rest, lineno, col)
            if word == "initial":
                if initial is not None:
                    raise DslError("second initial equation", lineno, 1)
                initial = eq
            else:
                final = eq
        elif word == "step":
            m = _STEP.match(body)
            if not m:
                raise DslError("expected 'step <rule>(<args>): <equation>'", lineno, 1)
            rule = m.group(1)
            if rule not in RULES:
                raise DslError(f"unknown rule {rule!r}", lineno, raw.index(rule) + 1)
            steps.append(Step(rule, _split_args(m.group(2)), parse_equation(m.group(3), lineno, raw.index(":") + 2), lineno))
        else:
            raise DslError(f"unknown directive {word!r}", lineno, 1)
        if word != "surface" and surface is None:
            raise DslError("equation before any surface directive", lineno, 1)
    if surface is None or initial is None:
        raise DslError("derivation needs a surface and an initial equation", 1, 1)
    return DerivationScript(surface, initial, steps, final, notes)


# -- rewriting helpers ------------------------------------------------------

def _rewrites(e: Expr, old: Expr, new: Expr):
    """Every expression obtained by replacing one occurrence of ``old``."""
    if e == old:
        yield new
    if isinstance(e, Comp):
        fs = list(e.factors)
        run = list(old.factors) if isinstance(old, Comp) else None
        if run:
            for i in range(len(fs) - len(run) + 1):
                if fs[i:i + len(run)] == run and len(run) < len(fs):
                    yield comp(*fs[:i], new, *fs[i + len(run):])
        for i, f in enumerate(fs):
            for r in _rewrites(f, old, new):
                yield comp(*fs[:i], r, *fs[i + 1:])
    elif isinstance(e, Power):
        for r in _rewrites(e.base, old, new):
            yield pow_(r, e.exp)


def _word(e: Expr) -> str:
    return format_expr(comp(*(Name(n) if x > 0 else Power(Name(n), -1) for n, x in flatten(e)))) if flatten(e) else "1"


def _inverse(e: Expr) -> Expr:
    return Power(e, -1)


def _commutes(w: Expr, r: Expr, model) -> bool:
    return exact_equal(comp(w, r), comp(r, w), model)


# -- checking ---------------------------------------------------------------

def check_step(prev: Equation, step: Step, model) -> StepResult:
    """Check one step locally against the previous equation."""
    new = step.result
    rule = step.rule
    try:
        bind(new[0], model)
        bind(new[1], model)
        if rule in ("expand_power", "free_cancel"):
            for side, a, b in (("lhs", prev[0], new[0]), ("rhs", prev[1], new[1])):
                if flatten(a) != flatten(b):
                    return StepResult(0, rule, False, f"{side} is not a formal rewrite: {_word(a)} vs {_word(b)}")
            return StepResult(0, rule, True)

        if rule == "substitute":
            if len(step.args) != 1:
                return StepResult(0, rule, False, "substitute takes one lemma")
            x, y = parse_equation(step.args[0])
            lemma = verify(RelationStatement(model.name, x, y, "exact"), "exact")
            if lemma.exact != "pass":
                return StepResult(0, rule, False, f"lemma {fmt_eq((x, y))} fails the exact engine ({lemma.witness})")
            options = [(r, prev[1]) for r in _rewrites(prev[0], x, y)]
            options += [(prev[0], r) for r in _rewrites(prev[1], x, y)]
            if any(o == new for o in options):
                return StepResult(0, rule, True, f"lemma {fmt_eq((x, y))} verified")
            return StepResult(0, rule, False, f"result is not the previous equation with one {format_expr(x)} rewritten")

        if rule == "conjugate_both_sides":
            if len(step.args) != 2 or step.args[1] not in JUSTIFICATIONS:
                return StepResult(0, rule, False, f"expected (conjugator, {' | '.join(JUSTIFICATIONS)})")
            w = parse_expr(step.args[0])
            bind(w, model)
            want_l = flatten(comp(w, prev[0], _inverse(w)))
            if flatten(new[0]) != want_l:
                return StepResult(0, rule, False, f"lhs should be {_word(comp(w, prev[0], _inverse(w)))}, got {_word(new[0])}")
            conj_r = flatten(comp(w, prev[1], _inverse(w)))
            if flatten(new[1]) not in (conj_r, flatten(prev[1])):
                return StepResult(0, rule, False, f"rhs should be {_word(comp(w, prev[1], _inverse(w)))}, got {_word(new[1])}")
            if not _commutes(w, prev[1], model):
                return StepResult(0, rule, False, f"{format_expr(prev[1])} does not commute with {format_expr(w)}")
            return StepResult(0, rule, True, f"{format_expr(w)} commutes with the right side (exact)")

        if rule == "rewrite_rhs_central":
            if len(step.args) != 1:
                return StepResult(0, rule, False, "rewrite_rhs_central takes one conjugator")
            w = parse_expr(step.args[0])
            bind(w, model)
            if flatten(new[0]) != flatten(prev[0]):
                return StepResult(0, rule, False, "lhs changed")
            if flatten(prev[1]) != flatten(comp(w, new[1], _inverse(w))):
                return StepResult(0, rule, False, f"old rhs {_word(prev[1])} is not a conjugate of the new one by {format_expr(w)}")
            if not _commutes(w, new[1], model):
                return StepResult(0, rule, False, f"{format_expr(new[1])} does not commute with {format_expr(w)}")
            return StepResult(0, rule, True)
    except (BindError, DslError, SurfaceError) as exc:
        return StepResult(0, rule, False, str(exc))
    return StepResult(0, rule, False, f"unknown rule {rule!r}")


def check_derivation(script: DerivationScript) -> DerivationReport:
    rep = DerivationReport(script.surface)
    try:
        model = surfaces.get(script.surface, "exact")
    except SurfaceError as exc:
        rep.error = str(exc)
        return rep
    if model.level != "exact":
        rep.error = f"{model.name} has no exact model"
        return rep
    eq = script.initial
    for i, step in enumerate(script.steps, start=1):
        r = check_step(eq, step, model)
        rep.steps.append(StepResult(i, r.rule, r.ok, r.message))
        eq = step.result
    if script.final is not None:
        rep.final_matches = fmt_eq(script.final) == fmt_eq(eq)
    for attr, e in (("initial_ok", script.initial), ("final_ok", eq)):
        try:
            res = verify(RelationStatement(model.name, e[0], e[1], "exact"), "exact")
            setattr(rep, attr, res.exact == "pass")
        except (BindError, SurfaceError) as exc:
            rep.error = str(exc)
    return rep


def final_equation(script: DerivationScript) -> Equation:
    return script.steps[-1].result if script.steps else script.initial
