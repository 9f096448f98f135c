"""Command-line interface.

Exit codes: 0 success, 1 a relation was refuted or a check failed,
2 usage, parse or model errors.  ``TWISTCHECK_FORMAT=json`` makes JSON the
default output format.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

from . import milnor, relations, surfaces
from .derivation import check_derivation, fmt_eq, parse_derivation
from .dsl import AssertDirective, DslError, parse_script
from .homology import HomologyError
from .relations import BindError
from .surfaces import SurfaceError
from .words import WordError

ENV_FORMAT = "TWISTCHECK_FORMAT"
OK, REFUTED, ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise UsageError(f"{path} is not UTF-8 text") from None


# -- verify ------------------------------------------------------------------

def _report_line(line: int, rep: relations.VerificationReport, verbose: int) -> str:
    s = rep.statement
    engines = f"homology {rep.homology}, exact {rep.exact}"
    out = f"line {line}: {s.source or s.text} on {s.surface}: {rep.verdict} [{engines}]"
    if rep.witness:
        out += f"\n    witness: {rep.witness}"
    if rep.detail and verbose >= 2:
        out += f"\n    {rep.detail}"
    return out


def cmd_verify(args) -> int:
    directives = parse_script(_read(args.script))
    asserts = [d for d in directives if isinstance(d, AssertDirective)]
    if not asserts:
        raise UsageError(f"{args.script} contains no assertions")
    results, lines = [], []
    for d in asserts:
        st = relations.from_assert(d)
        rep = relations.verify(st, args.engine or d.engine or "both")
        results.append((d.line, rep))
        lines.append(_report_line(d.line, rep, args.verbose))
    refuted = sum(r.refuted for _, r in results)
    verified = sum(r.verdict == "verified" for _, r in results)
    necessary = sum(r.verdict.startswith("passed") for _, r in results)
    summary = f"{len(results)} assertions: {verified} verified, {necessary} passed (necessary condition only), {refuted} refuted"
    payload = {
        "script": args.script,
        "results": [dict(r.as_dict(), line=ln) for ln, r in results],
        "summary": {"total": len(results), "verified": verified, "necessary_only": necessary, "refuted": refuted},
    }
    _emit(args, payload, "\n".join(lines + [summary]))
    return REFUTED if refuted else OK


# -- catalog -----------------------------------------------------------------

def cmd_catalog(args) -> int:
    fam = args.family
    if fam == "chain":
        if args.m is None or args.m < 1:
            raise UsageError("catalog chain needs --m >= 1")
        st = relations.chain_relation(args.m, args.variant)
    elif fam == "hkp":
        if args.k is None or args.k < 2:
            raise UsageError("catalog hkp needs --k >= 2")
        st = relations.hkp_relation(args.k, args.order)
    elif fam == "star":
        st = relations.star_relation()
    else:
        st = relations.corollary_relation()
    header = f"# {st.label}\n" if st.label else ""
    script = header + st.to_script()
    if args.output:
        Path(args.output).write_text(script)
    if args.json:
        print(json.dumps({"family": fam, "surface": st.surface, "statement": st.text, "script": script}, indent=2, sort_keys=True))
    elif not args.output:
        sys.stdout.write(script)
    return OK


# -- invariants --------------------------------------------------------------

def _fraction_list(text: str) -> List[Fraction]:
    try:
        return [Fraction(x.strip()) for x in text.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad number list {text!r}") from None


def _num(x: Fraction):
    return x.numerator if x.denominator == 1 else str(x)


def cmd_milnor(args) -> int:
    try:
        p = milnor.parse_poly(args.poly)
    except milnor.PolyError as exc:
        raise UsageError(f"polynomial: {exc}") from None
    if (args.weights is None) != (args.degree is None):
        raise UsageError("--weights and --degree go together")
    if args.weights is not None:
        w = milnor.WeightData.of(_fraction_list(args.weights), _fraction_list(args.degree)[0])
        inferred = False
        if len(w.weights) != p.nvars:
            raise UsageError(f"{len(w.weights)} weights for {p.nvars} variables")
        if not milnor.check_weighted_homogeneous(p, w):
            raise UsageError("polynomial is not weighted homogeneous for these weights")
    else:
        w = milnor.infer_weights(p)
        inferred = True
        if w is None:
            raise UsageError("could not infer unique positive weights; pass --weights and --degree")
    try:
        mu = milnor.milnor_number(w)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    shown = w.normalized()
    payload = {
        "poly": milnor.format_poly(p),
        "variables": p.nvars,
        "weights": [_num(x) for x in shown.weights],
        "degree": _num(shown.degree),
        "inferred": inferred,
        "milnor_number": mu,
    }
    ws = ",".join(str(_num(x)) for x in shown.weights)
    how = "inferred" if inferred else "given"
    _emit(args, payload, f"mu = {mu} ({how} weights ({ws}), d = {_num(shown.degree)})")
    return OK


def cmd_fiber(args) -> int:
    if args.k < 1:
        raise UsageError("--k must be >= 1")
    t = milnor.fiber_topology(args.k)
    _emit(args, t, f"genus {t['genus']}, boundary {t['boundary']}, euler {t['euler']}, h1_rank {t['h1_rank']}")
    return OK


def cmd_count(args) -> int:
    if args.n < 1 or args.k < 1:
        raise UsageError("--n and --k must be >= 1")
    total = milnor.twist_count(args.n, args.k)
    per = milnor.per_fiber_count(args.n, args.k)
    payload = {"n": args.n, "k": args.k, "twist_count": total, "per_fiber": per, "fractional_powers": milnor.fractional_powers(args.k)}
    _emit(args, payload, str(total))
    return OK


# -- surface / derivation ----------------------------------------------------

def cmd_surface(args) -> int:
    target = args.target
    if target in surfaces.BUILTIN_NAMES or surfaces._CHAIN_NAME.match(target):
        try:
            path = surfaces.DATA_DIR / f"{target}.json"
            model = surfaces.load(path) if path.exists() else surfaces.get(target)
        except SurfaceError as exc:
            raise UsageError(str(exc)) from None
    elif Path(target).exists():
        model = surfaces.load(target)
    else:
        raise UsageError(f"no builtin surface or file named {target!r}")
    rep = surfaces.validate(model)
    payload = {
        "surface": model.name,
        "ok": rep.ok,
        "checks": len(rep.checks),
        "failures": [{"check": c.name, "subject": c.subject, "witness": c.witness} for c in rep.failures()],
    }
    lines = [f"{model.name}: {len(rep.checks)} checks, {len(rep.failures())} failed"]
    lines += [str(c) for c in (rep.checks if args.verbose else rep.failures())]
    _emit(args, payload, "\n".join(lines))
    return OK if rep.ok else REFUTED


def cmd_derivation(args) -> int:
    text = _read(args.path)
    if not text.strip():
        raise UsageError(f"{args.path} is empty")
    script = parse_derivation(text)
    rep = check_derivation(script)
    if rep.error:
        raise UsageError(rep.error)
    lines = [f"initial {fmt_eq(script.initial)}: {'verified' if rep.initial_ok else 'FAILS exact engine'}"]
    for s, step in zip(rep.steps, script.steps):
        mark = "ok" if s.ok else "VIOLATION"
        msg = f" ({s.message})" if s.message else ""
        lines.append(f"step {s.index} {s.rule}: {mark}{msg}")
    lines.append(f"final: {'verified' if rep.final_ok else 'FAILS exact engine'}")
    if not rep.final_matches:
        lines.append("declared final equation differs from the last step")
    for n in script.notes:
        lines.append(f"note: {n}")
    payload = {
        "surface": script.surface,
        "ok": rep.ok,
        "initial_verified": rep.initial_ok,
        "final_verified": rep.final_ok,
        "final_matches": rep.final_matches,
        "steps": [{"index": s.index, "rule": s.rule, "ok": s.ok, "message": s.message} for s in rep.steps],
    }
    _emit(args, payload, "\n".join(lines))
    return OK if rep.ok else REFUTED


# -- entry point -------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    default_json = os.environ.get(ENV_FORMAT, "text").lower() == "json"
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", default=default_json, help="machine-readable output")
    common.add_argument("--text", dest="json", action="store_false", help="plain text output")
    common.add_argument("-v", "--verbose", action="count", default=0)

    p = _Parser(prog="twistcheck", description="Verify Dehn twist relations and compute fiber invariants.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", parents=[common], help="check the assertions of a relation script")
    v.add_argument("script")
    v.add_argument("--engine", choices=["homology", "exact", "both"])
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("catalog", parents=[common], help="emit a relation script")
    c.add_argument("family", choices=["chain", "star", "corollary", "hkp"])
    c.add_argument("--m", type=int)
    c.add_argument("--k", type=int)
    c.add_argument("--variant", choices=["standard", "squared_first"], default="standard")
    c.add_argument("--order", choices=["monodromy", "typographic"], default="monodromy")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_catalog)

    m = sub.add_parser("milnor", parents=[common], help="Milnor number of a weighted homogeneous polynomial")
    m.add_argument("--poly", required=True)
    m.add_argument("--weights")
    m.add_argument("--degree")
    m.set_defaults(func=cmd_milnor)

    f = sub.add_parser("fiber", parents=[common], help="topology of the fiber F_{k,k}")
    f.add_argument("--k", type=int, required=True)
    f.set_defaults(func=cmd_fiber)

    n = sub.add_parser("count", parents=[common], help="number of twists k(k-1)^n")
    n.add_argument("--n", type=int, required=True)
    n.add_argument("--k", type=int, required=True)
    n.set_defaults(func=cmd_count)

    s = sub.add_parser("surface", help="surface model tools")
    ssub = s.add_subparsers(dest="action", required=True, parser_class=_Parser)
    sv = ssub.add_parser("validate", parents=[common], help="run the model oracles")
    sv.add_argument("target", help="builtin name or path to a surface file")
    sv.set_defaults(func=cmd_surface)

    d = sub.add_parser("derivation", parents=[common], help="replay a derivation script")
    d.add_argument("path")
    d.set_defaults(func=cmd_derivation)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except (DslError, BindError, SurfaceError, WordError, HomologyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    except SystemExit as exc:  # --help
        return OK if exc.code in (0, None) else ERROR
    return ERROR


if __name__ == "__main__":
    sys.exit(main())
