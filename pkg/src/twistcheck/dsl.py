"""Twist-word expressions and relation scripts.

Grammar (whitespace insignificant, ASCII only)::

    expr    := factor ('*' factor)*
    factor  := atom postfix*
    postfix := "'" | '^' integer          (x' is sugar for x^-1)
    atom    := name | '(' expr ')'
    name    := [A-Za-z][A-Za-z0-9_]*

``a * b`` is the composition "a after b": the rightmost factor acts first,
as in :mod:`twistcheck.words`.  Composition is associative, so nested
products are flattened into one ``Comp`` node and parentheses leave no node
of their own.  ``x^1`` parses to ``x``; ``x^0`` is the identity class.

Scripts are line based::

    # comment
    surface S_1_3
    let Phi = Dr * Dp * Db * Dg
    assert Phi^3 == Db1 * Db2 * Db3 [engine=exact]
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

ENGINES = ("homology", "exact", "both")


class DslError(ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Name:
    name: str
    line: int = field(default=1, compare=False)
    column: int = field(default=1, compare=False)


@dataclass(frozen=True)
class Comp:
    factors: Tuple["Expr", ...]


@dataclass(frozen=True)
class Power:
    base: "Expr"
    exp: int


Expr = Union[Name, Comp, Power]


def comp(*factors: Expr) -> Expr:
    """Flattening constructor; a single factor is returned unchanged."""
    flat: List[Expr] = []
    for f in factors:
        flat.extend(f.factors if isinstance(f, Comp) else (f,))
    if not flat:
        raise ValueError("empty composition")
    return flat[0] if len(flat) == 1 else Comp(tuple(flat))


def pow_(base: Expr, exp: int) -> Expr:
    return base if exp == 1 else Power(base, exp)


# -- tokenizer -------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<int>[0-9]+)"
    r"|(?P<eq>==)|(?P<op>[*'^()\-])"
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str, line: int = 1, column: int = 1) -> List[_Tok]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = column + pos
        if not m:
            raise DslError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind != "ws":
            out.append(_Tok(kind if kind != "op" else m.group(), m.group(), line, col))
        pos = m.end()
    out.append(_Tok("end", "", line, column + len(text)))
    return out


class _Parser:
    def __init__(self, toks: List[_Tok]):
        self.toks = toks
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self, kind: str) -> _Tok:
        t = self.peek()
        if t.kind != kind:
            want = {"name": "a name", "int": "an integer", "end": "end of input"}.get(kind, repr(kind))
            got = "end of input" if t.kind == "end" else repr(t.text)
            raise DslError(f"expected {want}, found {got}", t.line, t.column)
        self.i += 1
        return t

    def expr(self) -> Expr:
        factors = [self.factor()]
        while self.peek().kind == "*":
            self.i += 1
            factors.append(self.factor())
        return comp(*factors)

    def factor(self) -> Expr:
        e = self.atom()
        while True:
            t = self.peek()
            if t.kind == "'":
                self.i += 1
                e = Power(e, -1)
            elif t.kind == "^":
                self.i += 1
                sign = 1
                if self.peek().kind == "-":
                    self.i += 1
                    sign = -1
                e = pow_(e, sign * int(self.take("int").text))
            else:
                return e

    def atom(self) -> Expr:
        t = self.peek()
        if t.kind == "name":
            self.i += 1
            return Name(t.text, t.line, t.column)
        if t.kind == "(":
            self.i += 1
            e = self.expr()
            self.take(")")
            return e
        got = "end of input" if t.kind == "end" else repr(t.text)
        raise DslError(f"expected a name or '(', found {got}", t.line, t.column)


def _parse_tokens(toks: List[_Tok]) -> Expr:
    if toks[0].kind == "end":
        raise DslError("empty expression", toks[0].line, toks[0].column)
    p = _Parser(toks)
    e = p.expr()
    p.take("end")
    return e


def parse_expr(text: Union[str, bytes], line: int = 1, column: int = 1) -> Expr:
    if isinstance(text, (bytes, bytearray)):
        text = bytes(text).decode("utf-8", errors="replace")
    return _parse_tokens(_tokenize(text, line, column))


def format_expr(e: Expr) -> str:
    if isinstance(e, Name):
        return e.name
    if isinstance(e, Comp):
        return "*".join(
            f"({format_expr(f)})" if isinstance(f, Comp) else format_expr(f) for f in e.factors
        )
    if isinstance(e, Power):
        base = format_expr(e.base)
        if not isinstance(e.base, Name):
            base = f"({base})"
        if e.exp == 1:
            return format_expr(e.base)
        return base + ("'" if e.exp == -1 else f"^{e.exp}")
    raise TypeError(f"not an expression: {e!r}")


def names(e: Expr) -> List[Name]:
    """Every name occurrence, left to right."""
    if isinstance(e, Name):
        return [e]
    if isinstance(e, Comp):
        return [n for f in e.factors for n in names(f)]
    return names(e.base)


def substitute(e: Expr, table: Dict[str, Expr]) -> Expr:
    if isinstance(e, Name):
        return table.get(e.name, e)
    if isinstance(e, Comp):
        return comp(*(substitute(f, table) for f in e.factors))
    return pow_(substitute(e.base, table), e.exp)


def flatten(e: Expr) -> List[Tuple[str, int]]:
    """The free-group word of ``e`` over its names, freely reduced."""
    out: List[Tuple[str, int]] = []

    def walk(x: Expr, sign: int) -> List[Tuple[str, int]]:
        if isinstance(x, Name):
            return [(x.name, sign)]
        if isinstance(x, Comp):
            fs = x.factors if sign > 0 else tuple(reversed(x.factors))
            return [l for f in fs for l in walk(f, sign)]
        inner = walk(x.base, sign if x.exp > 0 else -sign)
        return inner * abs(x.exp)

    for letter in walk(e, 1):
        if out and out[-1][0] == letter[0] and out[-1][1] == -letter[1]:
            out.pop()
        else:
            out.append(letter)
    return out


def from_letters(letters: List[Tuple[str, int]]) -> Optional[Expr]:
    """Expression for a free-group word; None for the empty word."""
    if not letters:
        return None
    return comp(*(Name(n) if x > 0 else Power(Name(n), -1) for n, x in letters))


# -- scripts -----------------------------------------------------------------

@dataclass(frozen=True)
class SurfaceDirective:
    name: str
    line: int


@dataclass(frozen=True)
class LetDirective:
    name: str
    expr: Expr
    line: int


@dataclass(frozen=True)
class AssertDirective:
    surface: str
    lhs: Expr
    rhs: Expr
    engine: Optional[str]
    line: int
    source: str = ""

    @property
    def text(self) -> str:
        return f"{format_expr(self.lhs)} == {format_expr(self.rhs)}"


Directive = Union[SurfaceDirective, LetDirective, AssertDirective]

_ENGINE_TAG = re.compile(r"\[\s*engine\s*=\s*([A-Za-z]*)\s*\]\s*$")
_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*$")


def parse_equation(text: str, line: int = 1, column: int = 1) -> Tuple[Expr, Expr]:
    """Parse ``lhs == rhs``."""
    toks = _tokenize(text, line, column)
    eqs = [i for i, t in enumerate(toks) if t.kind == "eq"]
    if len(eqs) != 1:
        where = toks[eqs[1]] if len(eqs) > 1 else toks[-1]
        raise DslError("expected exactly one '=='", where.line, where.column)
    i = eqs[0]
    end = toks[-1]
    lhs = _parse_tokens(toks[:i] + [_Tok("end", "", toks[i].line, toks[i].column)])
    rhs = _parse_tokens(toks[i + 1:] if i + 1 < len(toks) else [end])
    return lhs, rhs


def _strip_comment(raw: str) -> str:
    return raw.split("#", 1)[0].rstrip()


def parse_script(text: Union[str, bytes]) -> List[Directive]:
    """Parse a relation script.

    Lets are expanded into later assertions.  A ``surface`` line opens a new
    scope: lets made under a previous surface are dropped, lets made before
    the first surface stay visible everywhere.
    """
    if isinstance(text, (bytes, bytearray)):
        text = bytes(text).decode("utf-8", errors="replace")
    out: List[Directive] = []
    surface: Optional[str] = None
    global_lets: Dict[str, Expr] = {}
    lets: Dict[str, Expr] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = _strip_comment(raw)
        stripped = body.lstrip()
        if not stripped:
            continue
        col = len(body) - len(stripped) + 1
        word, _, rest = stripped.partition(" ")
        rest_col = col + len(word) + 1 + (len(rest) - len(rest.lstrip()))
        rest = rest.strip()
        if word == "surface":
            if not _IDENT.match(rest):
                raise DslError("surface needs one name", lineno, rest_col)
            surface = rest
            lets = dict(global_lets)
            out.append(SurfaceDirective(rest, lineno))
        elif word == "let":
            m = re.match(r"([A-Za-z][A-Za-z0-9_]*)\s*=(?!=)", rest)
            if not m:
                raise DslError("expected 'let <name> = <expr>'", lineno, rest_col)
            name = m.group(1)
            if name in lets:
                raise DslError(f"duplicate let {name!r}", lineno, rest_col)
            expr = substitute(parse_expr(rest[m.end():], lineno, rest_col + m.end()), lets)
            lets[name] = expr
            if surface is None:
                global_lets[name] = expr
            out.append(LetDirective(name, expr, lineno))
        elif word == "assert":
            if surface is None:
                raise DslError("assert before any surface directive", lineno, col)
            engine = None
            m = _ENGINE_TAG.search(rest)
            if m:
                engine = m.group(1)
                if engine not in ENGINES:
                    raise DslError(f"unknown engine tag {engine!r}", lineno, rest_col + m.start(1))
                rest = rest[:m.start()].rstrip()
            lhs, rhs = parse_equation(rest, lineno, rest_col)
            out.append(AssertDirective(surface, substitute(lhs, lets), substitute(rhs, lets), engine, lineno, rest))
        else:
            raise DslError(f"unknown directive {word!r}", lineno, col)
    return out
