"""Surface models: spine, peripheral words, curves and their twist tables.

Shipped models live in ``data/surfaces/*.json`` and are validated every
time they are loaded.  Exact models carry a twist table for each curve;
homology models (the larger F_{k,k}) carry classes and intersection data
only.  The files are regenerated by :mod:`twistcheck.modelgen`.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from . import homology as hom
from .words import (
    GroupoidMorphism,
    SpineGraph,
    Word,
    WordError,
    check_declared_inverse,
    cyclic_reduce,
    first_difference,
    format_letters,
    is_conjugate,
)

DATA_DIR = Path(__file__).parent / "data" / "surfaces"
BUILTIN_NAMES = ("S_1_1", "S_1_2", "S_1_3", "annulus")
SHIPPED_CHAIN = (4, 5, 6)


class SurfaceError(ValueError):
    pass


class UnsupportedLevel(SurfaceError):
    """An exact model was requested where only homology data exists."""


@dataclass(frozen=True)
class CurveData:
    name: str
    homology: Tuple[int, ...]
    is_boundary: bool = False
    twist: Optional[GroupoidMorphism] = field(default=None, compare=False)
    intersections: Dict[str, int] = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class SurfaceModel:
    name: str
    genus: int
    boundary_count: int
    graph: SpineGraph = field(compare=False)
    peripheral: Tuple[Word, ...] = field(compare=False)
    homology_basis: Tuple[str, ...]
    intersection_form: hom.Matrix
    curves: Dict[str, CurveData] = field(compare=False)
    # extra names resolving to existing curves (e.g. "1_1" on F_3_3)
    aliases: Dict[str, str] = field(default_factory=dict, compare=False)

    @property
    def rank(self) -> int:
        return len(self.homology_basis)

    @property
    def basepoint(self) -> str:
        return self.graph.vertices[0]

    @property
    def tree(self) -> List[str]:
        return [e for e in self.graph.edges if e not in self.homology_basis]

    @property
    def level(self) -> str:
        if self.curves and all(c.twist is not None for c in self.curves.values()):
            return "exact"
        return "homology"

    def curve(self, name: str) -> CurveData:
        return self.curves[self.aliases.get(name, name)]

    def has_curve(self, name: str) -> bool:
        return self.aliases.get(name, name) in self.curves

    def curve_names(self) -> List[str]:
        return list(self.curves) + list(self.aliases)

    def boundary_curves(self) -> List[str]:
        return [n for n, c in self.curves.items() if c.is_boundary]


def euler_characteristic(g: int, b: int) -> int:
    return 2 - 2 * g - b


# -- serialization -------------------------------------------------------

def from_dict(data: dict) -> SurfaceModel:
    try:
        graph = SpineGraph(data["vertices"], [(e["name"], e["from"], e["to"]) for e in data["edges"]])
        periph = tuple(graph.word(p["word"], p["basepoint"]) for p in data["peripheral"])
        curves = {}
        for c in data["curves"]:
            twist = None
            if c.get("twist"):
                twist = GroupoidMorphism(graph, c["twist"], c.get("twist_inverse") or None)
            curves[c["name"]] = CurveData(
                name=c["name"],
                homology=tuple(int(x) for x in c["homology"]),
                is_boundary=bool(c["is_boundary"]),
                twist=twist,
                intersections={k: int(v) for k, v in c.get("intersections", {}).items()},
            )
        return SurfaceModel(
            name=data["name"],
            genus=int(data["genus"]),
            boundary_count=int(data["boundary_count"]),
            graph=graph,
            peripheral=periph,
            homology_basis=tuple(data["homology_basis"]),
            intersection_form=tuple(tuple(int(x) for x in row) for row in data["intersection_form"]),
            curves=curves,
        )
    except (KeyError, TypeError) as exc:
        raise SurfaceError(f"malformed surface definition: missing or bad field {exc}") from None
    except WordError as exc:
        raise SurfaceError(f"malformed surface definition: {exc}") from None


def to_dict(model: SurfaceModel) -> dict:
    g = model.graph
    curves = []
    for c in model.curves.values():
        tw = c.twist
        curves.append({
            "name": c.name,
            "is_boundary": c.is_boundary,
            "homology": list(c.homology),
            "twist": tw.to_table() if tw else {},
            "twist_inverse": (
                {n: format_letters(w.letters) for n, w in tw.inverse_images.items()}
                if tw and tw.inverse_images else {}
            ),
            "intersections": dict(c.intersections),
        })
    return {
        "name": model.name,
        "genus": model.genus,
        "boundary_count": model.boundary_count,
        "vertices": list(g.vertices),
        "edges": [{"name": e.name, "from": e.source, "to": e.target} for e in g.edges.values()],
        "peripheral": [{"basepoint": w.source, "word": format_letters(w.letters)} for w in model.peripheral],
        "homology_basis": list(model.homology_basis),
        "intersection_form": [list(r) for r in model.intersection_form],
        "curves": curves,
    }


def load(path) -> SurfaceModel:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise SurfaceError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SurfaceError(f"{path}: not valid JSON ({exc.msg}, line {exc.lineno})") from None
    return from_dict(data)


def save(model: SurfaceModel, path) -> None:
    Path(path).write_text(json.dumps(to_dict(model), indent=1) + "\n")


# -- validation ----------------------------------------------------------

@dataclass(frozen=True)
class Check:
    name: str
    subject: str
    ok: bool
    witness: str = ""

    def __str__(self):
        mark = "ok" if self.ok else "FAIL"
        tail = f": {self.witness}" if self.witness and not self.ok else ""
        return f"[{mark}] {self.name} ({self.subject}){tail}"


@dataclass
class ValidationReport:
    surface: str
    checks: List[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> List[Check]:
        return [c for c in self.checks if not c.ok]

    def failed_names(self) -> List[str]:
        return sorted({c.name for c in self.failures()})

    def add(self, name: str, subject: str, ok: bool, witness: str = "") -> None:
        self.checks.append(Check(name, subject, bool(ok), "" if ok else witness))


def _validate_topology(m: SurfaceModel, rep: ValidationReport) -> bool:
    g = m.graph
    chi = euler_characteristic(m.genus, m.boundary_count)
    rep.add("euler", m.name, g.euler_characteristic() == chi,
            f"V - E = {g.euler_characteristic()}, 2 - 2g - b = {chi}")
    rep.add("connected", m.name, g.is_connected(), "spine graph is disconnected")
    r = 2 * m.genus + m.boundary_count - 1
    rank_ok = len(g.edges) - len(g.vertices) + 1 == r and m.rank == r
    rep.add("rank", m.name, rank_ok, f"loop rank {len(g.edges) - len(g.vertices) + 1}, basis {m.rank}, expected {r}")
    rep.add("vertices", m.name, len(g.vertices) == m.boundary_count == len(m.peripheral),
            "need one basepoint and one peripheral word per boundary")
    q = m.intersection_form
    shape_ok = len(q) == m.rank and all(len(row) == m.rank for row in q)
    rep.add("form_shape", m.name, shape_ok, f"form is not {m.rank}x{m.rank}")
    if not shape_ok or not rank_ok:
        return False
    anti = all(q[i][j] == -q[j][i] for i in range(m.rank) for j in range(m.rank))
    rep.add("form_antisymmetric", m.name, anti, "form is not antisymmetric with zero diagonal")
    rep.add("form_rank", m.name, hom.form_rank(q) == 2 * m.genus,
            f"rank {hom.form_rank(q)}, expected {2 * m.genus}")
    try:
        hom.abelianization_matrix(m.graph.identity(), m.basepoint, m.tree)
        tree_ok = True
    except hom.HomologyError as exc:
        tree_ok, why = False, str(exc)
    rep.add("basis_tree", m.name, tree_ok, "" if tree_ok else why)
    for w in m.peripheral:
        # the stored word is reduced; its cyclic reduction must not vanish
        good = w.is_loop() and len(cyclic_reduce(w)) > 0
        rep.add("peripheral", w.source, good, f"{w} does not reduce to a nonempty cyclic loop")
    return tree_ok


def _validate_curves(m: SurfaceModel, rep: ValidationReport) -> None:
    q = m.intersection_form
    boundary = m.boundary_curves()
    total = [0] * m.rank
    for n in boundary:
        total = [a + b for a, b in zip(total, m.curves[n].homology)]
    rep.add("boundary_sum", m.name, not any(total), f"sum of boundary classes is {total}")
    for n in boundary:
        c = m.curves[n].homology
        rad = all(hom.pairing(c, e, q) == 0 for e in _unit_vectors(m.rank))
        rep.add("boundary_radical", n, rad, f"class {list(c)} pairs nontrivially with the basis")
    if len(boundary) != m.boundary_count:
        rep.add("boundary_count", m.name, False, f"{len(boundary)} boundary curves for b = {m.boundary_count}")

    for n, c in m.curves.items():
        if len(c.homology) != m.rank:
            rep.add("class_length", n, False, f"length {len(c.homology)}, expected {m.rank}")
            continue
        if c.twist is None:
            continue
        phi = c.twist
        if phi.inverse_images is None:
            rep.add("inverse", n, False, "no declared inverse table")
        else:
            bad = check_declared_inverse(phi)
            rep.add("inverse", n, bad is None, f"declared inverse fails on edge {bad}")
        a = hom.abelianization_matrix(phi, m.basepoint, m.tree)
        t = hom.transvection(c.homology, q)
        diff = hom.first_difference(a, t)
        rep.add("abelianization", n, diff is None,
                diff and f"basis vector {m.homology_basis[diff[0]]}: table gives {list(diff[1])}, class gives {list(diff[2])}")
        for w in m.peripheral:
            img = phi(w)
            rep.add("peripheral_conjugacy", f"{n}@{w.source}", is_conjugate(img, w), f"{w} -> {img}")
            rep.add("peripheral_fixed", f"{n}@{w.source}", img == w, f"{w} -> {img}")

    names = list(m.curves)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            ca, cb = m.curves[a], m.curves[b]
            iab, iba = ca.intersections.get(b), cb.intersections.get(a)
            subject = f"{a},{b}"
            if iab is None or iba is None:
                rep.add("intersections_declared", subject, False, "pair has no declared intersection number")
                continue
            rep.add("intersections_symmetric", subject, iab == iba, f"{iab} vs {iba}")
            alg = hom.pairing(ca.homology, cb.homology, q)
            rep.add("intersection_bound", subject, abs(alg) <= iab and (iab - alg) % 2 == 0,
                    f"algebraic {alg} vs geometric {iab}")
            if ca.twist is None or cb.twist is None or iab not in (0, 1):
                continue
            ta, tb = ca.twist, cb.twist
            if iab == 0:
                lhs, rhs, label = ta * tb, tb * ta, "commutation"
            else:
                lhs, rhs, label = ta * tb * ta, tb * ta * tb, "braid"
            diff = first_difference(lhs, rhs)
            rep.add(label, subject, diff is None, diff and f"edge {diff[0]}: {diff[1]} vs {diff[2]}")


def _unit_vectors(r: int):
    return [tuple(int(i == j) for j in range(r)) for i in range(r)]


def validate(model: SurfaceModel) -> ValidationReport:
    """Run every structural and curve oracle; failures become report entries."""
    rep = ValidationReport(model.name)
    try:
        if _validate_topology(model, rep):
            _validate_curves(model, rep)
    except (WordError, hom.HomologyError) as exc:
        rep.add("structure", model.name, False, str(exc))
    return rep


# -- builtin models ------------------------------------------------------

def _load_checked(path: Path) -> SurfaceModel:
    model = load(path)
    rep = validate(model)
    if not rep.ok:
        first = rep.failures()[0]
        raise SurfaceError(f"shipped model {model.name} failed validation: {first}")
    return model


@lru_cache(maxsize=None)
def builtin(name: str) -> SurfaceModel:
    if name not in BUILTIN_NAMES:
        raise SurfaceError(f"unknown builtin surface {name!r} (known: {', '.join(BUILTIN_NAMES)})")
    return _load_checked(DATA_DIR / f"{name}.json")


_F33_ALIASES = {"1_1": "b", "1_2": "g", "2_1": "r", "2_2": "p"}


@lru_cache(maxsize=None)
def chain_surface(k: int, level: str = "homology") -> SurfaceModel:
    """The fiber F_{k,k} with curves ``i_j`` for alpha_{i,j}.

    k = 2 and k = 3 are the exact annulus and S_1_3 models, with the alpha
    names added as aliases.  Larger k are homology models, shipped for
    k <= 6 and generated on demand beyond.
    """
    if not isinstance(k, int) or k < 2:
        raise SurfaceError(f"chain_surface needs an integer k >= 2, got {k!r}")
    if level not in ("homology", "exact"):
        raise SurfaceError(f"unknown level {level!r}")
    if k == 2:
        return replace(builtin("annulus"), aliases={"1_1": "core"})
    if k == 3:
        return replace(builtin("S_1_3"), aliases=dict(_F33_ALIASES))
    if level == "exact":
        raise UnsupportedLevel(f"exact twist tables exist only for k = 2, 3 (asked for k = {k})")
    if k in SHIPPED_CHAIN:
        return _load_checked(DATA_DIR / f"F_{k}_{k}.json")
    from .modelgen import fkk
    from .ribbon import build_surface_data

    model = from_dict(build_surface_data(fkk(k)))
    rep = validate(model)
    if not rep.ok:
        raise SurfaceError(f"generated F_{k}_{k} failed validation: {rep.failures()[0]}")
    return model


_CHAIN_NAME = re.compile(r"F_(\d+)_(\d+)$")


def get(name: str, level: str = "homology") -> SurfaceModel:
    """Resolve a surface name used in scripts: builtins and ``F_k_k``."""
    if name in BUILTIN_NAMES:
        return builtin(name)
    m = _CHAIN_NAME.match(name)
    if m and m.group(1) == m.group(2):
        return chain_surface(int(m.group(1)), level)
    raise SurfaceError(f"unknown surface {name!r}")
