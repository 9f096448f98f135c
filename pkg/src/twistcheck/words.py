"""Free groupoid words over a spine graph.

A spine graph has one vertex per boundary basepoint and one edge per
groupoid generator.  A :class:`Word` is a composable path of signed edges;
a :class:`GroupoidMorphism` sends every edge to a word with the same
endpoints and carries a declared inverse table.

Composition follows functional order throughout: ``compose_morphisms(f, g)``
is ``f o g`` and applies ``g`` first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

Letter = Tuple[str, int]


class WordError(ValueError):
    """Raised for non-composable words or mismatched endpoints."""


@dataclass(frozen=True)
class Edge:
    name: str
    source: str
    target: str


class SpineGraph:
    """A finite directed multigraph whose edges generate a free groupoid."""

    def __init__(self, vertices: Sequence[str], edges: Iterable[Tuple[str, str, str]]):
        self.vertices: Tuple[str, ...] = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise WordError("duplicate vertex names")
        self.edges: Dict[str, Edge] = {}
        for name, src, tgt in edges:
            if name in self.edges:
                raise WordError(f"duplicate edge {name!r}")
            for v in (src, tgt):
                if v not in self.vertices:
                    raise WordError(f"edge {name!r} uses unknown vertex {v!r}")
            self.edges[name] = Edge(name, src, tgt)

    def __repr__(self):
        return f"SpineGraph({len(self.vertices)} vertices, {len(self.edges)} edges)"

    def __eq__(self, other):
        return (
            isinstance(other, SpineGraph)
            and self.vertices == other.vertices
            and self.edges == other.edges
        )

    def __hash__(self):
        return hash((self.vertices, tuple(sorted(self.edges.items()))))

    def endpoints(self, letter: Letter) -> Tuple[str, str]:
        name, exp = letter
        try:
            e = self.edges[name]
        except KeyError:
            raise WordError(f"unknown edge {name!r}") from None
        return (e.source, e.target) if exp > 0 else (e.target, e.source)

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        adj: Dict[str, set] = {v: set() for v in self.vertices}
        for e in self.edges.values():
            adj[e.source].add(e.target)
            adj[e.target].add(e.source)
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self.vertices)

    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges)

    def word(self, letters, source: Optional[str] = None) -> "Word":
        """Build a reduced word from a letter list or its text form.

        ``source`` is required for the empty word.
        """
        if isinstance(letters, str):
            letters = parse_letters(letters)
        return reduce(Word(self, tuple(letters), source))

    def identity(self) -> "GroupoidMorphism":
        table = {e: self.word([(e, 1)]) for e in self.edges}
        return GroupoidMorphism(self, table, dict(table))


def parse_letters(text: str) -> List[Letter]:
    """Parse ``"a b' a"`` into ``[('a', 1), ('b', -1), ('a', 1)]``."""
    out: List[Letter] = []
    for tok in text.split():
        exp = 1
        while tok.endswith("'"):
            tok = tok[:-1]
            exp = -exp
        if not tok:
            raise WordError("empty letter in word text")
        out.append((tok, exp))
    return out


def format_letters(letters: Sequence[Letter]) -> str:
    return " ".join(name if exp > 0 else name + "'" for name, exp in letters)


@dataclass(frozen=True)
class Word:
    """A path in the spine graph.  Equality ignores the graph object."""

    graph: SpineGraph = field(compare=False, repr=False)
    letters: Tuple[Letter, ...]
    source: Optional[str] = None
    target: Optional[str] = field(default=None)

    def __post_init__(self):
        letters = tuple((str(n), 1 if e > 0 else -1) for n, e in self.letters)
        object.__setattr__(self, "letters", letters)
        if not letters:
            if self.source is None:
                raise WordError("empty word needs an explicit vertex")
            if self.source not in self.graph.vertices:
                raise WordError(f"unknown vertex {self.source!r}")
            object.__setattr__(self, "target", self.source)
            return
        src, cur = self.graph.endpoints(letters[0])
        if self.source is not None and self.source != src:
            raise WordError(f"word starts at {src!r}, not {self.source!r}")
        for i, letter in enumerate(letters[1:], start=1):
            s, t = self.graph.endpoints(letter)
            if s != cur:
                raise WordError(
                    f"letter {i} ({format_letters([letter])}) starts at {s!r}"
                    f" but the previous letter ends at {cur!r}"
                )
            cur = t
        object.__setattr__(self, "source", src)
        object.__setattr__(self, "target", cur)

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return format_letters(self.letters) if self.letters else f"1_{self.source}"

    def __mul__(self, other: "Word") -> "Word":
        return compose_words(self, other)

    def inverse(self) -> "Word":
        return Word(self.graph, tuple((n, -e) for n, e in reversed(self.letters)), self.target)

    def is_loop(self) -> bool:
        return self.source == self.target


def _free_reduce(letters: Iterable[Letter]) -> List[Letter]:
    stack: List[Letter] = []
    for name, exp in letters:
        if stack and stack[-1][0] == name and stack[-1][1] == -exp:
            stack.pop()
        else:
            stack.append((name, exp))
    return stack


def reduce(w: Word) -> Word:
    """Cancel adjacent inverse pairs; the result is the unique reduced word."""
    return Word(w.graph, tuple(_free_reduce(w.letters)), w.source)


def compose_words(u: Word, v: Word) -> Word:
    """Reduced concatenation ``u`` then ``v``."""
    if u.target != v.source:
        raise WordError(f"cannot compose: {u.target!r} != {v.source!r}")
    return Word(u.graph, tuple(_free_reduce(u.letters + v.letters)), u.source)


def cyclic_reduce(w: Word) -> Word:
    """Strip cancelling first/last letters of a reduced loop."""
    if not w.is_loop():
        raise WordError("cyclic reduction needs a loop")
    letters = _free_reduce(w.letters)
    i, j = 0, len(letters)
    while j - i >= 2 and letters[i][0] == letters[j - 1][0] and letters[i][1] == -letters[j - 1][1]:
        i += 1
        j -= 1
    core = letters[i:j]
    if core:
        return Word(w.graph, tuple(core))
    return Word(w.graph, (), w.source)


def is_conjugate(u: Word, v: Word) -> bool:
    """True iff the loops ``u`` and ``v`` are conjugate in the free group.

    Both must be loops at the same basepoint; conjugacy is decided by
    comparing cyclic reductions up to rotation.
    """
    if not (u.is_loop() and v.is_loop()):
        raise WordError("is_conjugate takes loops")
    if u.source != v.source:
        raise WordError("loops are based at different vertices")
    a = cyclic_reduce(u).letters
    b = cyclic_reduce(v).letters
    if len(a) != len(b):
        return False
    if not a:
        return True
    doubled = a + a
    return any(doubled[i:i + len(b)] == b for i in range(len(a)))


class GroupoidMorphism:
    """An endpoint-preserving map from edge generators to words.

    ``images`` maps each edge to its image; ``inverse_images`` is the declared
    inverse table (or None when no inverse is known).
    """

    def __init__(
        self,
        graph: SpineGraph,
        images: Mapping[str, Word],
        inverse_images: Optional[Mapping[str, Word]] = None,
    ):
        self.graph = graph
        self.images: Dict[str, Word] = {}
        for name, edge in graph.edges.items():
            if name not in images:
                raise WordError(f"morphism has no image for edge {name!r}")
            img = reduce(_coerce(graph, images[name], edge.source))
            if (img.source, img.target) != (edge.source, edge.target):
                raise WordError(
                    f"image of {name!r} runs {img.source}->{img.target},"
                    f" expected {edge.source}->{edge.target}"
                )
            self.images[name] = img
        extra = set(images) - set(graph.edges)
        if extra:
            raise WordError(f"images for unknown edges: {sorted(extra)}")
        self.inverse_images: Optional[Dict[str, Word]] = None
        if inverse_images is not None:
            self.inverse_images = {
                n: reduce(_coerce(graph, inverse_images[n], graph.edges[n].source))
                for n in graph.edges
            }

    def __call__(self, w: Word) -> Word:
        return apply(self, w)

    def __mul__(self, other: "GroupoidMorphism") -> "GroupoidMorphism":
        return compose_morphisms(self, other)

    def __eq__(self, other):
        return isinstance(other, GroupoidMorphism) and equal_morphisms(self, other)

    def __hash__(self):
        return hash(tuple(sorted((n, w.letters) for n, w in self.images.items())))

    def __repr__(self):
        body = ", ".join(f"{n} -> {w}" for n, w in self.images.items())
        return f"GroupoidMorphism({body})"

    def is_identity(self) -> bool:
        return all(w.letters == ((n, 1),) for n, w in self.images.items())

    def to_table(self) -> Dict[str, str]:
        return {n: format_letters(w.letters) for n, w in self.images.items()}


def _coerce(graph: SpineGraph, w, source: str) -> Word:
    if isinstance(w, Word):
        return w
    if isinstance(w, str):
        w = parse_letters(w)
    return Word(graph, tuple(w), source)


def apply(phi: GroupoidMorphism, w: Word) -> Word:
    """Reduced image of ``w``; functorial in ``w``."""
    if w.graph != phi.graph and w.graph is not phi.graph:
        raise WordError("word and morphism live on different graphs")
    out: List[Letter] = []
    for name, exp in w.letters:
        try:
            img = phi.images[name]
        except KeyError:
            raise WordError(f"edge {name!r} not in the morphism's domain") from None
        if exp > 0:
            out.extend(img.letters)
        else:
            out.extend((n, -e) for n, e in reversed(img.letters))
        out = _free_reduce(out)
    return Word(phi.graph, tuple(out), w.source)


def _check_same_graph(phi: GroupoidMorphism, psi: GroupoidMorphism):
    if phi.graph != psi.graph:
        raise WordError("morphisms are defined on different graphs")


def compose_morphisms(phi: GroupoidMorphism, psi: GroupoidMorphism) -> GroupoidMorphism:
    """``phi o psi``: apply ``psi`` first."""
    _check_same_graph(phi, psi)
    images = {n: apply(phi, w) for n, w in psi.images.items()}
    inverse = None
    if phi.inverse_images is not None and psi.inverse_images is not None:
        phi_inv = GroupoidMorphism(phi.graph, phi.inverse_images)
        psi_inv = GroupoidMorphism(psi.graph, psi.inverse_images)
        inverse = {n: apply(psi_inv, w) for n, w in phi_inv.images.items()}
    return GroupoidMorphism(phi.graph, images, inverse)


def invert(phi: GroupoidMorphism) -> GroupoidMorphism:
    if phi.inverse_images is None:
        raise WordError("morphism has no declared inverse")
    return GroupoidMorphism(phi.graph, phi.inverse_images, phi.images)


def power(phi: GroupoidMorphism, n: int) -> GroupoidMorphism:
    """``phi`` composed with itself ``n`` times (negative n uses the inverse)."""
    if n < 0:
        return power(invert(phi), -n)
    result = phi.graph.identity()
    base = phi
    while n:
        if n & 1:
            result = compose_morphisms(result, base)
        n >>= 1
        if n:
            base = compose_morphisms(base, base)
    return result


def equal_morphisms(phi: GroupoidMorphism, psi: GroupoidMorphism) -> bool:
    _check_same_graph(phi, psi)
    return all(phi.images[n].letters == psi.images[n].letters for n in phi.graph.edges)


def first_difference(phi: GroupoidMorphism, psi: GroupoidMorphism):
    """First edge (in graph order) whose images differ, with both images."""
    _check_same_graph(phi, psi)
    for n in phi.graph.edges:
        if phi.images[n].letters != psi.images[n].letters:
            return n, phi.images[n], psi.images[n]
    return None


def check_declared_inverse(phi: GroupoidMorphism) -> Optional[str]:
    """Return the first edge where the declared inverse fails, else None."""
    inv = invert(phi)
    for a, b in ((phi, inv), (inv, phi)):
        comp = compose_morphisms(a, b)
        for n, w in comp.images.items():
            if w.letters != ((n, 1),):
                return n
    return None


def spanning_tree(graph: SpineGraph, root: str) -> List[str]:
    """Edges of a BFS spanning tree rooted at ``root`` (edge order breaks ties)."""
    seen = {root}
    tree: List[str] = []
    frontier = [root]
    while frontier:
        nxt = []
        for v in frontier:
            for e in graph.edges.values():
                for a, b in ((e.source, e.target), (e.target, e.source)):
                    if a == v and b not in seen:
                        seen.add(b)
                        tree.append(e.name)
                        nxt.append(b)
        frontier = nxt
    return tree


def tree_paths(graph: SpineGraph, basepoint: str, tree: Sequence[str]) -> Dict[str, Word]:
    """Path in ``tree`` from ``basepoint`` to every vertex.

    Raises WordError when ``tree`` is not a spanning tree of ``graph``.
    """
    tree = list(tree)
    if len(set(tree)) != len(tree) or any(t not in graph.edges for t in tree):
        raise WordError("tree edges must be distinct edges of the graph")
    if len(tree) != len(graph.vertices) - 1:
        raise WordError("not a spanning tree: wrong number of edges")
    paths: Dict[str, List[Letter]] = {basepoint: []}
    changed = True
    while changed:
        changed = False
        for name in tree:
            e = graph.edges[name]
            if e.source in paths and e.target not in paths:
                paths[e.target] = paths[e.source] + [(name, 1)]
                changed = True
            elif e.target in paths and e.source not in paths:
                paths[e.source] = paths[e.target] + [(name, -1)]
                changed = True
    if len(paths) != len(graph.vertices):
        raise WordError("not a spanning tree: tree does not reach every vertex")
    return {v: Word(graph, tuple(p), basepoint) for v, p in paths.items()}


def loop_basis(graph: SpineGraph, basepoint: str, tree: Sequence[str]) -> List[Word]:
    """One loop at ``basepoint`` per non-tree edge, in graph edge order."""
    paths = tree_paths(graph, basepoint, tree)
    tree = set(tree)
    out = []
    for name, e in graph.edges.items():
        if name in tree:
            continue
        w = paths[e.source] * graph.word([(name, 1)]) * paths[e.target].inverse()
        out.append(w)
    return out
