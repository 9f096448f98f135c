"""Ribbon-graph surfaces and a Dehn twist calculator on boundary-based paths.

This module generates the shipped surface files.  A surface is the
thickening of a ribbon graph: one disk per vertex, one band per edge, with
the half-edges at each vertex listed counterclockwise.  A closed curve is a
cyclic edge path, drawn as parallel strands inside the bands and as chords
inside the vertex disks.  A path between boundary basepoints is drawn the
same way, and the twist of that path along a simple curve is read off by
inserting one copy of the curve at every crossing.

Half-edges are ``(edge, '+')`` at the edge's source and ``(edge, '-')`` at
its target.  Across a band, strands carry a coordinate ``s`` in (0, 1)
measured from the left edge when looking from source to target.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .words import Letter, _free_reduce

HalfEdge = Tuple[str, str]


class RibbonError(ValueError):
    pass


class RibbonGraph:
    def __init__(self, rotations: Dict[str, Sequence[HalfEdge]]):
        self.rotations = {v: list(hs) for v, hs in rotations.items()}
        self.where: Dict[HalfEdge, Tuple[str, int]] = {}
        for v, hs in self.rotations.items():
            for i, h in enumerate(hs):
                if h in self.where:
                    raise RibbonError(f"half-edge {h} listed twice")
                self.where[h] = (v, i)
        self.edges: Dict[str, Tuple[str, str]] = {}
        for (e, end), (v, _) in self.where.items():
            if end not in "+-":
                raise RibbonError(f"bad half-edge end {end!r}")
            if (e, "-" if end == "+" else "+") not in self.where:
                raise RibbonError(f"edge {e!r} has a single half-edge")
        order = [h for v in self.rotations for h in self.rotations[v]]
        for e, end in order:
            if e not in self.edges:
                self.edges[e] = (self.where[(e, "+")][0], self.where[(e, "-")][0])

    def degree(self, v: str) -> int:
        return len(self.rotations[v])

    def sigma(self, h: HalfEdge) -> HalfEdge:
        v, i = self.where[h]
        hs = self.rotations[v]
        return hs[(i + 1) % len(hs)]

    @staticmethod
    def iota(h: HalfEdge) -> HalfEdge:
        return (h[0], "-" if h[1] == "+" else "+")

    @staticmethod
    def exit_letter(h: HalfEdge) -> Letter:
        return (h[0], 1 if h[1] == "+" else -1)

    @staticmethod
    def departure(letter: Letter) -> HalfEdge:
        return (letter[0], "+" if letter[1] > 0 else "-")

    @staticmethod
    def arrival(letter: Letter) -> HalfEdge:
        return (letter[0], "-" if letter[1] > 0 else "+")

    def start_vertex(self, letter: Letter) -> str:
        return self.where[self.departure(letter)][0]

    def end_vertex(self, letter: Letter) -> str:
        return self.where[self.arrival(letter)][0]

    def faces(self) -> List[List[HalfEdge]]:
        """Boundary cycles as lists of exit half-edges (surface on the left)."""
        seen = set()
        out = []
        for v in self.rotations:
            for h in self.rotations[v]:
                if h in seen:
                    continue
                cyc = []
                cur = h
                while cur not in seen:
                    seen.add(cur)
                    cyc.append(cur)
                    cur = self.sigma(self.iota(cur))
                out.append(cyc)
        return out

    def euler_characteristic(self) -> int:
        return len(self.rotations) - len(self.edges)

    def genus(self) -> int:
        g2 = 2 - self.euler_characteristic() - len(self.faces())
        return g2 // 2

    # -- geometry on a vertex circle ------------------------------------
    def coord(self, h: HalfEdge, s: Fraction) -> Fraction:
        """Counterclockwise coordinate of a strand with band coordinate s."""
        _, i = self.where[h]
        u = 1 - s if h[1] == "+" else s
        return i + Fraction(1, 10) + Fraction(8, 10) * u

    def corner(self, h: HalfEdge) -> Fraction:
        """Coordinate of the boundary corner just before ``h``."""
        return Fraction(self.where[h][1])


@dataclass(frozen=True)
class Chord:
    vertex: str
    a: Fraction
    b: Fraction


def _in_arc(x: Fraction, a: Fraction, b: Fraction, d: int) -> bool:
    return 0 < (x - a) % d < (b - a) % d


def _crosses(c1: Chord, c2: Chord, d: int) -> bool:
    return _in_arc(c2.a, c1.a, c1.b, d) != _in_arc(c2.b, c1.a, c1.b, d)


class Curve:
    """A closed edge path drawn with a fixed strand order in every band."""

    def __init__(self, graph: RibbonGraph, letters: Sequence[Letter], ranks: Optional[Dict[int, Fraction]] = None):
        self.graph = graph
        self.letters = list(letters)
        if not self.letters:
            raise RibbonError("empty curve")
        for k, L in enumerate(self.letters):
            nxt = self.letters[(k + 1) % len(self.letters)]
            if graph.end_vertex(L) != graph.start_vertex(nxt):
                raise RibbonError("curve letters are not composable")
        self.s = ranks if ranks is not None else _default_ranks(self.letters)
        self.chords = [self._chord(k) for k in range(len(self.letters))]

    def _chord(self, k: int) -> Chord:
        g = self.graph
        L = self.letters[k]
        N = self.letters[(k + 1) % len(self.letters)]
        arr = g.arrival(L)
        dep = g.departure(N)
        nk = (k + 1) % len(self.letters)
        return Chord(g.where[arr][0], g.coord(arr, self.s[k]), g.coord(dep, self.s[nk]))

    def self_crossings(self) -> int:
        n = 0
        for c1, c2 in itertools.combinations(self.chords, 2):
            if c1.vertex == c2.vertex and _crosses(c1, c2, self.graph.degree(c1.vertex)):
                n += 1
        return n

    def loop_from(self, k: int, forward: bool) -> List[Letter]:
        """The curve as a loop starting at the vertex after letter ``k``."""
        m = len(self.letters)
        seq = [self.letters[(k + 1 + i) % m] for i in range(m)]
        if forward:
            return seq
        return [(n, -e) for n, e in reversed(seq)]


def _default_ranks(letters: Sequence[Letter]) -> Dict[int, Fraction]:
    by_edge: Dict[str, List[int]] = {}
    for k, (e, _) in enumerate(letters):
        by_edge.setdefault(e, []).append(k)
    s = {}
    for ks in by_edge.values():
        for r, k in enumerate(ks):
            s[k] = Fraction(r + 1, len(ks) + 1)
    return s


def simple_realizations(graph: RibbonGraph, letters: Sequence[Letter], limit: int = 200000) -> Iterable[Curve]:
    """Yield every strand ordering of ``letters`` with no self-crossing."""
    by_edge: Dict[str, List[int]] = {}
    for k, (e, _) in enumerate(letters):
        by_edge.setdefault(e, []).append(k)
    edges = list(by_edge)
    perms = [list(itertools.permutations(by_edge[e])) for e in edges]
    count = 0
    for choice in itertools.product(*perms):
        count += 1
        if count > limit:
            raise RibbonError("realization search exceeded its limit")
        s = {}
        for order in choice:
            for r, k in enumerate(order):
                s[k] = Fraction(r + 1, len(order) + 1)
        c = Curve(graph, letters, s)
        if c.self_crossings() == 0:
            yield c


def realize(graph: RibbonGraph, letters: Sequence[Letter]) -> Curve:
    for c in simple_realizations(graph, letters):
        return c
    raise RibbonError(f"no simple realization for {letters}")


@dataclass
class PathSpec:
    """A path from a boundary corner to a boundary corner."""

    start: HalfEdge  # corner just before this half-edge
    letters: List[Letter]
    end: HalfEdge


def _path_chords(graph: RibbonGraph, path: PathSpec, band_s: Dict[str, Fraction]) -> List[Chord]:
    v0 = graph.where[path.start][0]
    chords = []
    cur_v, cur_x = v0, graph.corner(path.start)
    for L in path.letters:
        dep = graph.departure(L)
        if graph.where[dep][0] != cur_v:
            raise RibbonError("path letters are not composable")
        chords.append(Chord(cur_v, cur_x, graph.coord(dep, band_s[L[0]])))
        arr = graph.arrival(L)
        cur_v, cur_x = graph.where[arr][0], graph.coord(arr, band_s[L[0]])
    if graph.where[path.end][0] != cur_v:
        raise RibbonError("path does not end at its end corner")
    chords.append(Chord(cur_v, cur_x, graph.corner(path.end)))
    return chords


def _gamma_positions(graph: RibbonGraph, curve: Curve) -> Dict[str, Fraction]:
    counts: Dict[str, int] = {}
    for e, _ in curve.letters:
        counts[e] = counts.get(e, 0) + 1
    return {e: Fraction(1, 2 * (counts.get(e, 0) + 1)) for e in graph.edges}


def _crossings(graph: RibbonGraph, chord: Chord, curve: Curve):
    """Crossings of ``chord`` with the curve, ordered along the chord.

    Yields (strand index, goes_right) where goes_right tells whether the
    curve's forward direction points to the right of the chord.
    """
    d = graph.degree(chord.vertex)
    hits = []
    for k, cc in enumerate(curve.chords):
        if cc.vertex != chord.vertex:
            continue
        ina = _in_arc(cc.a, chord.a, chord.b, d)
        inb = _in_arc(cc.b, chord.a, chord.b, d)
        if ina == inb:
            continue
        x = cc.b if inb else cc.a
        hits.append(((x - chord.a) % d, k, inb))
    hits.sort()
    return [(k, right) for _, k, right in hits]


def twist_path(graph: RibbonGraph, curve: Curve, path: PathSpec, sign: int = 1) -> List[Letter]:
    """Edge path of the image of ``path`` under the twist along ``curve``.

    ``sign=+1`` is the right-handed twist (turn right on meeting the curve),
    ``sign=-1`` its inverse.
    """
    band_s = _gamma_positions(graph, curve)
    out: List[Letter] = []
    for j, ch in enumerate(_path_chords(graph, path, band_s)):
        for k, right in _crossings(graph, ch, curve):
            out.extend(curve.loop_from(k, right if sign > 0 else not right))
        if j < len(path.letters):
            out.append(path.letters[j])
    return _free_reduce(out)


def algebraic_intersection(graph: RibbonGraph, path: PathSpec, curve: Curve) -> int:
    """Signed count: +1 where the curve crosses to the right of the path."""
    band_s = _gamma_positions(graph, curve)
    total = 0
    for ch in _path_chords(graph, path, band_s):
        for _, right in _crossings(graph, ch, curve):
            total += 1 if right else -1
    return total


def crossing_count(c1: Curve, c2: Curve) -> int:
    n = 0
    for a in c1.chords:
        for b in c2.chords:
            if a.vertex == b.vertex and _crosses(a, b, c1.graph.degree(a.vertex)):
                n += 1
    return n


def min_crossings(graph: RibbonGraph, l1: Sequence[Letter], l2: Sequence[Letter], limit: int = 50) -> int:
    """Fewest crossings over joint strand orders keeping both curves simple.

    An upper bound for the geometric intersection number; exact for the
    bigon-free configurations used in the shipped models.
    """
    best = None
    r1 = list(itertools.islice(simple_realizations(graph, l1), limit))
    r2 = list(itertools.islice(simple_realizations(graph, l2), limit))
    m1 = len(l1)
    joint = list(l1) + list(l2)
    for a in r1:
        for b in r2:
            by_edge: Dict[str, Tuple[List[int], List[int]]] = {}
            for k in range(m1):
                by_edge.setdefault(joint[k][0], ([], []))[0].append(k)
            for k in range(len(l2)):
                by_edge.setdefault(joint[m1 + k][0], ([], []))[1].append(m1 + k)
            edges = list(by_edge)
            options = []
            for e in edges:
                ka, kb = by_edge[e]
                ka = sorted(ka, key=lambda k: a.s[k])
                kb = sorted(kb, key=lambda k: b.s[k - m1])
                n = len(ka) + len(kb)
                merges = []
                for slots in itertools.combinations(range(n), len(kb)):
                    order, ia, ib = [], iter(ka), iter(kb)
                    for pos in range(n):
                        order.append(next(ib) if pos in slots else next(ia))
                    merges.append(order)
                options.append(merges)
            for choice in itertools.product(*options):
                s = {}
                for order in choice:
                    for r, k in enumerate(order):
                        s[k] = Fraction(r + 1, len(order) + 1)
                ca = Curve(graph, l1, {k: s[k] for k in range(m1)})
                cb = Curve(graph, l2, {k: s[m1 + k] for k in range(len(l2))})
                n = crossing_count(ca, cb)
                if best is None or n < best:
                    best = n
    if best is None:
        raise RibbonError("curves have no simple realization")
    return best


# -- spine extraction ---------------------------------------------------

class SpineBuilder:
    """Groupoid generators for a ribbon surface with boundary basepoints.

    One basepoint sits on each boundary cycle (at the corner before the
    cycle's first half-edge).  Generators are a loop at the first basepoint
    for each non-tree edge, plus a path from the first basepoint to every
    other basepoint.
    """

    def __init__(
        self,
        graph: RibbonGraph,
        tree: Sequence[str],
        loop_names: Dict[str, str],
        faces: Optional[List[List[HalfEdge]]] = None,
        basepoints: Optional[Sequence[str]] = None,
        arc_names: Optional[Sequence[str]] = None,
    ):
        self.graph = graph
        self.tree = list(tree)
        self.faces = faces if faces is not None else graph.faces()
        b = len(self.faces)
        self.basepoints = list(basepoints) if basepoints else [f"p{j + 1}" for j in range(b)]
        self.arc_names = list(arc_names) if arc_names else [f"t{j + 1}" for j in range(1, b)]
        self.corners = [f[0] for f in self.faces]
        self.root = graph.where[self.corners[0]][0]
        self.loop_edges = [e for e in graph.edges if e not in set(self.tree)]
        self.loop_names = {e: loop_names[e] for e in self.loop_edges}
        self.paths = self._tree_paths()

    def _tree_paths(self) -> Dict[str, List[Letter]]:
        g = self.graph
        paths = {self.root: []}
        changed = True
        while changed:
            changed = False
            for e in self.tree:
                s, t = g.edges[e]
                if s in paths and t not in paths:
                    paths[t] = paths[s] + [(e, 1)]
                    changed = True
                elif t in paths and s not in paths:
                    paths[s] = paths[t] + [(e, -1)]
                    changed = True
        if len(paths) != len(g.rotations) or len(self.tree) != len(g.rotations) - 1:
            raise RibbonError("tree is not a spanning tree")
        return paths

    @staticmethod
    def _inv(ls: Sequence[Letter]) -> List[Letter]:
        return [(n, -e) for n, e in reversed(ls)]

    def spine_edges(self) -> List[Tuple[str, str, str]]:
        p1 = self.basepoints[0]
        out = [(self.loop_names[e], p1, p1) for e in self.loop_edges]
        for j in range(1, len(self.basepoints)):
            out.append((self.arc_names[j - 1], p1, self.basepoints[j]))
        return out

    def generator_paths(self) -> Dict[str, PathSpec]:
        g = self.graph
        c0 = self.corners[0]
        out = {}
        for e in self.loop_edges:
            s, t = g.edges[e]
            letters = _free_reduce(self.paths[s] + [(e, 1)] + self._inv(self.paths[t]))
            out[self.loop_names[e]] = PathSpec(c0, letters, c0)
        for j in range(1, len(self.basepoints)):
            v = g.where[self.corners[j]][0]
            out[self.arc_names[j - 1]] = PathSpec(c0, list(self.paths[v]), self.corners[j])
        return out

    def to_spine(self, letters: Sequence[Letter], start: int = 0, end: int = 0) -> List[Letter]:
        """Spine word of an edge path from basepoint ``start`` to ``end``."""
        tree = set(self.tree)
        out: List[Letter] = []
        if start:
            out.append((self.arc_names[start - 1], -1))
        for e, x in letters:
            if e not in tree:
                out.append((self.loop_names[e], x))
        if end:
            out.append((self.arc_names[end - 1], 1))
        return _free_reduce(out)

    def from_spine(self, letters: Sequence[Letter]) -> List[Letter]:
        """Edge path (based at the root vertex) of a spine word."""
        g = self.graph
        by_loop = {v: k for k, v in self.loop_names.items()}
        by_arc = {name: j + 1 for j, name in enumerate(self.arc_names)}
        out: List[Letter] = []
        for name, x in letters:
            if name in by_loop:
                e = by_loop[name]
                s, t = g.edges[e]
                seg = self.paths[s] + [(e, 1)] + self._inv(self.paths[t])
            else:
                v = g.where[self.corners[by_arc[name]]][0]
                seg = list(self.paths[v])
            out.extend(seg if x > 0 else self._inv(seg))
        return _free_reduce(out)

    def peripheral(self, j: int) -> List[Letter]:
        letters = [RibbonGraph.exit_letter(h) for h in self.faces[j]]
        return self.to_spine(letters, j, j)

    def homology(self, letters: Sequence[Letter]) -> List[int]:
        vec = [0] * len(self.loop_edges)
        idx = {e: i for i, e in enumerate(self.loop_edges)}
        for e, x in letters:
            if e in idx:
                vec[idx[e]] += x
        return vec

    def twist_table(self, curve: Curve, sign: int = 1) -> Dict[str, List[Letter]]:
        table = {}
        arc_index = {name: j + 1 for j, name in enumerate(self.arc_names)}
        for name, path in self.generator_paths().items():
            img = twist_path(self.graph, curve, path, sign)
            table[name] = self.to_spine(img, 0, arc_index.get(name, 0))
        return table

    def intersection_form(self) -> List[List[int]]:
        paths = self.generator_paths()
        loops = [paths[self.loop_names[e]] for e in self.loop_edges]
        form = []
        for p in loops:
            row = []
            for q in loops:
                c = Curve(self.graph, _cyclic(q.letters))
                row.append(algebraic_intersection(self.graph, p, c))
            form.append(row)
        return form


def _cyclic(letters: Sequence[Letter]) -> List[Letter]:
    ls = _free_reduce(letters)
    while len(ls) >= 2 and ls[0][0] == ls[-1][0] and ls[0][1] == -ls[-1][1]:
        ls = ls[1:-1]
    return ls


def cyclic_reduce_letters(letters: Sequence[Letter]) -> List[Letter]:
    return _cyclic(letters)


def braid_closure_surface(strands: int, crossings: Sequence[int], mirror: bool = False) -> RibbonGraph:
    """Seifert surface of the closure of a positive braid.

    ``crossings`` lists generator indices (1-based).  Disk ``i`` is the
    Seifert circle of strand ``i``; the j-th crossing of generator ``i`` is
    band ``B{i}_{j}`` from disk ``i`` to disk ``i+1``.
    """
    seen: Dict[int, int] = {}
    at: Dict[int, List[HalfEdge]] = {i: [] for i in range(1, strands + 1)}
    for i in crossings:
        if not 1 <= i < strands:
            raise RibbonError(f"generator {i} out of range")
        seen[i] = seen.get(i, 0) + 1
        name = f"B{i}_{seen[i]}"
        at[i].append((name, "+"))
        at[i + 1].append((name, "-"))
    rot = {f"D{i}": (list(reversed(hs)) if mirror else hs) for i, hs in at.items()}
    return RibbonGraph(rot)


# -- change of generators ------------------------------------------------

def _inverse(letters: Sequence[Letter]) -> List[Letter]:
    return [(n, -e) for n, e in reversed(letters)]


def substitute(letters: Sequence[Letter], table: Dict[str, List[Letter]]) -> List[Letter]:
    """Replace every letter named in ``table`` by its image word."""
    out: List[Letter] = []
    for name, x in letters:
        img = table.get(name, [(name, 1)])
        out.extend(img if x > 0 else _inverse(img))
    return _free_reduce(out)


def solve_generators(new_defs: Dict[str, List[Letter]], old_names: Sequence[str]) -> Dict[str, List[Letter]]:
    """Invert a change of free generators given as ``new -> word in old``.

    Solves one old letter at a time: a definition whose word, after
    substituting the letters already solved, contains exactly one unsolved
    old letter, exactly once, determines that letter.
    """
    solved: Dict[str, List[Letter]] = {}
    pending = dict(new_defs)
    while len(solved) < len(old_names):
        progress = False
        for new, word in list(pending.items()):
            w = substitute(word, solved)
            unknown = [(i, l) for i, l in enumerate(w) if l[0] in old_names and l[0] not in solved]
            if len(unknown) != 1:
                continue
            i, (name, x) = unknown[0]
            sol = _free_reduce(_inverse(w[:i]) + [(new, 1)] + _inverse(w[i + 1:]))
            solved[name] = sol if x > 0 else _inverse(sol)
            del pending[new]
            progress = True
        if not progress:
            raise RibbonError("change of generators is not triangular")
    for new, word in pending.items():
        if substitute(word, solved) != [(new, 1)]:
            raise RibbonError(f"generator {new} is not free over the others")
    return solved


def _abelian(word: Sequence[Letter], names: Sequence[str]) -> List[int]:
    vec = [0] * len(names)
    for n, x in word:
        if n in names:
            vec[names.index(n)] += x
    return vec


def fmt(letters: Sequence[Letter]) -> str:
    return " ".join(n if x > 0 else n + "'" for n, x in letters)


@dataclass
class ModelSpec:
    """Recipe for one shipped surface file.

    ``loops`` defines the genus loops of the shipped spine as words in the
    builder's loops; ``None`` keeps the builder's loops unchanged.  For every
    other boundary a peripheral loop ``d<j>`` is added and one builder loop
    is eliminated through it.  ``derived`` names curves obtained as the
    image of one curve under the twist along another.
    """

    name: str
    graph: RibbonGraph
    tree: List[str]
    loop_names: Dict[str, str]
    curves: Dict[str, List[Letter]]
    face_starts: Optional[List[HalfEdge]] = None
    loops: Optional[Dict[str, List[Letter]]] = None
    derived: Dict[str, Tuple[str, str]] = field(default_factory=dict)
    exact: bool = True
    boundary_names: Optional[List[str]] = None


def _faces_from(graph: RibbonGraph, starts: Optional[List[HalfEdge]]):
    faces = graph.faces()
    if not starts:
        return faces
    out = []
    for h in starts:
        f = next(f for f in faces if h in f)
        i = f.index(h)
        out.append(f[i:] + f[:i])
    if len(out) != len(faces):
        raise RibbonError("face_starts must name one half-edge per boundary")
    return out


def build_surface_data(spec: ModelSpec) -> dict:
    """Generate the JSON-compatible surface definition for ``spec``."""
    g = spec.graph
    faces = _faces_from(g, spec.face_starts)
    sb = SpineBuilder(g, spec.tree, spec.loop_names, faces=faces)
    b = len(faces)
    old = [spec.loop_names[e] for e in sb.loop_edges]
    arcs = list(sb.arc_names)

    # new generators, all read as loops at p1; d_j enters as t_j d_j t_j'
    defs: Dict[str, List[Letter]] = {}
    periph: Dict[str, Tuple[str, str]] = {}  # placeholder -> (d_j, t_j)
    if spec.loops is None:
        defs = {n: [(n, 1)] for n in old}
    else:
        defs = {n: list(w) for n, w in spec.loops.items()}
        for j in range(1, 1 + len(old) - len(defs)):
            key = f"#d{j + 1}"
            t = arcs[j - 1]
            defs[key] = _free_reduce([(t, 1)] + sb.peripheral(j) + [(t, -1)])
            periph[key] = (f"d{j + 1}", t)
    if len(defs) != len(old):
        raise RibbonError(f"{spec.name}: {len(defs)} generators for rank {len(old)}")
    solved = solve_generators(defs, old)

    def to_new(word: Sequence[Letter]) -> List[Letter]:
        w = substitute(word, solved)
        out: List[Letter] = []
        for n, x in w:
            if n in periph:
                d, t = periph[n]
                out.extend([(t, 1), (d, x), (t, -1)])
            else:
                out.append((n, x))
        return _free_reduce(out)

    back = {d: _free_reduce([(t, -1)] + defs[key] + [(t, 1)]) for key, (d, t) in periph.items()}
    back.update({n: w for n, w in defs.items() if n not in periph})

    def to_old(word: Sequence[Letter]) -> List[Letter]:
        return substitute(word, back)

    p1 = sb.basepoints[0]
    basis = [periph[n][0] if n in periph else n for n in defs]
    edges = []
    for n in defs:
        if n in periph:
            j = int(periph[n][0][1:]) - 1
            edges.append((periph[n][0], sb.basepoints[j], sb.basepoints[j]))
        else:
            edges.append((n, p1, p1))
    edges += [(t, p1, sb.basepoints[j + 1]) for j, t in enumerate(arcs)]
    for n in old:
        if to_old(to_new([(n, 1)])) != [(n, 1)]:
            raise RibbonError(f"generator change does not invert on {n}")

    q_old = sb.intersection_form()
    cols = [_abelian(w, old) for w in defs.values()]
    r = len(old)
    form = [[sum(cols[i][a] * q_old[a][c] * cols[j][c] for a in range(r) for c in range(r))
             for j in range(r)] for i in range(r)]

    def based(letters: Sequence[Letter]) -> List[Letter]:
        p = sb.paths[g.start_vertex(letters[0])]
        return sb.to_spine(_free_reduce(p + list(letters) + _inverse(p)))

    paths: Dict[str, List[Letter]] = dict(spec.curves)
    tables: Dict[str, Tuple[dict, dict]] = {}

    def add_tables(name: str) -> None:
        c = realize(g, paths[name])
        tables[name] = (sb.twist_table(c, 1), sb.twist_table(c, -1))

    if spec.exact:
        for n in spec.curves:
            add_tables(n)
    for n, (twister, target) in spec.derived.items():
        w = substitute(based(paths[target]), tables[twister][0])
        paths[n] = cyclic_reduce_letters(sb.from_spine(w))
        add_tables(n)
    boundary = []
    for j, f in enumerate(faces):
        n = spec.boundary_names[j] if spec.boundary_names else f"b{j + 1}"
        paths[n] = [RibbonGraph.exit_letter(h) for h in f]
        boundary.append(n)
        if spec.exact:
            add_tables(n)

    def new_table(old_table: Dict[str, List[Letter]]) -> Dict[str, str]:
        return {e[0]: fmt(to_new(substitute(to_old([(e[0], 1)]), old_table))) for e in edges}

    names = list(paths)
    curves = []
    for n in names:
        vec = _abelian(to_new(based(paths[n])), basis)
        entry = {"name": n, "is_boundary": n in boundary, "homology": vec}
        if spec.exact:
            entry["twist"] = new_table(tables[n][0])
            entry["twist_inverse"] = new_table(tables[n][1])
        else:
            entry["twist"] = {}
            entry["twist_inverse"] = {}
        entry["intersections"] = {}
        curves.append(entry)
    for i, a in enumerate(names):
        for j in range(i + 1, len(names)):
            c = names[j]
            k = 0 if (a in boundary or c in boundary) else min_crossings(g, paths[a], paths[c])
            curves[i]["intersections"][c] = k
            curves[j]["intersections"][a] = k

    return {
        "name": spec.name,
        "genus": g.genus(),
        "boundary_count": b,
        "vertices": list(sb.basepoints),
        "edges": [{"name": n, "from": s, "to": t} for n, s, t in edges],
        "peripheral": [
            {"basepoint": sb.basepoints[j], "word": fmt(to_new(sb.peripheral(j)))} for j in range(b)
        ],
        "homology_basis": basis,
        "intersection_form": form,
        "curves": curves,
    }
