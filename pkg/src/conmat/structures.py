"""Finite relational structures, standard graph families and symmetry utilities.

A Structure is the common carrier for graphs, digraphs, labeled graphs and
word models: a universe {0..n-1}, relation tuples, optional constants and an
optional built-in linear order (always the natural order on the universe).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple


class StructureError(ValueError):
    pass


class SizeBoundError(RuntimeError):
    """An exact evaluator was asked to exceed its configured size bound."""


@dataclass(frozen=True)
class Vocabulary:
    relations: Tuple[Tuple[str, int], ...]  # (symbol, arity)
    constants: Tuple[str, ...] = ()
    ordered: bool = False

    def __post_init__(self):
        names = [r for r, _ in self.relations] + list(self.constants)
        if len(set(names)) != len(names):
            raise StructureError("duplicate symbol names in vocabulary")
        for r, a in self.relations:
            if a < 1:
                raise StructureError(f"arity of {r} must be >= 1")

    def arity(self, sym: str) -> int:
        for r, a in self.relations:
            if r == sym:
                return a
        raise StructureError(f"unknown relation symbol {sym!r}")

    def has_relation(self, sym: str) -> bool:
        return any(r == sym for r, _ in self.relations)


GRAPH = Vocabulary(relations=(("E", 2),))
ORDERED_GRAPH = Vocabulary(relations=(("E", 2),), ordered=True)
DIGRAPH = GRAPH
EMPTY_VOC = Vocabulary(relations=())


@dataclass(frozen=True)
class Structure:
    vocabulary: Vocabulary
    n: int
    relations: Dict[str, FrozenSet[Tuple[int, ...]]]
    constants: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        for sym, tuples in self.relations.items():
            arity = self.vocabulary.arity(sym)
            for t in tuples:
                if len(t) != arity:
                    raise StructureError(f"arity mismatch in {sym}: {t}")
                if any(not (0 <= x < self.n) for x in t):
                    raise StructureError(f"element out of range in {sym}: {t}")
        for c, v in self.constants.items():
            if c not in self.vocabulary.constants:
                raise StructureError(f"unknown constant {c!r}")
            if not (0 <= v < self.n):
                raise StructureError(f"constant {c} out of range: {v}")
        for c in self.vocabulary.constants:
            if c not in self.constants:
                raise StructureError(f"constant {c} not interpreted")

    def rel(self, sym: str) -> FrozenSet[Tuple[int, ...]]:
        return self.relations.get(sym, frozenset())

    def universe(self) -> range:
        return range(self.n)

    def key(self) -> tuple:
        """Hashable identity used for memoization."""
        rels = tuple(sorted((s, tuple(sorted(ts))) for s, ts in self.relations.items()))
        consts = tuple(sorted(self.constants.items()))
        return (self.n, rels, consts, self.vocabulary.ordered)

    # -- graph views ---------------------------------------------------

    def edges(self) -> List[Tuple[int, int]]:
        """Undirected edge list (u < v); requires a symmetric E."""
        return sorted({(min(u, v), max(u, v)) for (u, v) in self.rel("E") if u != v})

    def arcs(self) -> List[Tuple[int, int]]:
        return sorted(self.rel("E"))

    def adjacency(self) -> List[set]:
        adj: List[set] = [set() for _ in range(self.n)]
        for (u, v) in self.rel("E"):
            if u != v:
                adj[u].add(v)
                adj[v].add(u)
        return adj

    def out_adjacency(self) -> List[set]:
        adj: List[set] = [set() for _ in range(self.n)]
        for (u, v) in self.rel("E"):
            adj[u].add(v)
        return adj

    def adjacency_masks(self) -> List[int]:
        masks = [0] * self.n
        for (u, v) in self.rel("E"):
            if u != v:
                masks[u] |= 1 << v
                masks[v] |= 1 << u
        return masks

    def is_symmetric(self) -> bool:
        e = self.rel("E")
        return all((v, u) in e for (u, v) in e)

    def is_irreflexive(self) -> bool:
        return all(u != v for (u, v) in self.rel("E"))

    def degree_sequence(self) -> List[int]:
        return [len(a) for a in self.adjacency()]


def make_structure(
    vocabulary: Vocabulary,
    n: int,
    relations: Dict[str, Iterable[Tuple[int, ...]]],
    constants: Optional[Dict[str, int]] = None,
) -> Structure:
    """Validated structure constructor."""
    rels = {s: frozenset(tuple(t) for t in ts) for s, ts in relations.items()}
    for s in rels:
        vocabulary.arity(s)
    return Structure(vocabulary, n, rels, dict(constants or {}))


def make_graph(
    n: int,
    edges: Iterable[Tuple[int, int]],
    directed: bool = False,
    labels: Optional[Dict[str, int]] = None,
    ordered: bool = False,
) -> Structure:
    """Simple graph or digraph; undirected edges are stored symmetrically."""
    labels = dict(labels or {})
    voc = Vocabulary(relations=(("E", 2),), constants=tuple(sorted(labels)), ordered=ordered)
    arcs = set()
    for (u, v) in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise StructureError(f"edge endpoint out of range: {(u, v)}")
        if u == v:
            raise StructureError(f"self-loop not allowed: {(u, v)}")
        arcs.add((u, v))
        if not directed:
            arcs.add((v, u))
    return make_structure(voc, n, {"E": arcs}, labels)


def with_labels(g: Structure, labels: Dict[str, int]) -> Structure:
    """Re-declare a graph's constants (labels), keeping edges."""
    merged = dict(g.constants)
    merged.update(labels)
    voc = Vocabulary(
        relations=g.vocabulary.relations,
        constants=tuple(sorted(merged)),
        ordered=g.vocabulary.ordered,
    )
    return Structure(voc, g.n, dict(g.relations), merged)


def drop_constants(g: Structure) -> Structure:
    voc = Vocabulary(relations=g.vocabulary.relations, constants=(), ordered=g.vocabulary.ordered)
    return Structure(voc, g.n, dict(g.relations), {})


def as_ordered(g: Structure) -> Structure:
    voc = Vocabulary(relations=g.vocabulary.relations, constants=g.vocabulary.constants, ordered=True)
    return Structure(voc, g.n, dict(g.relations), dict(g.constants))


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FamilyId:
    kind: str
    index: int
    index2: int = 0

    def __str__(self):
        if self.kind == "complete_bipartite":
            return f"{self.kind}({self.index},{self.index2})"
        return f"{self.kind}({self.index})"


def generate(fam: FamilyId) -> Structure:
    """Canonical, deterministic instance of a named family member."""
    kind, n = fam.kind, fam.index
    if kind == "dirpath":
        if n < 1:
            raise StructureError("dirpath needs n >= 1")
        return make_graph(n, [(i, i + 1) for i in range(n - 1)], directed=True,
                          labels={"start": 0, "end": n - 1})
    if kind == "path":
        if n < 1:
            raise StructureError("path needs n >= 1")
        return make_graph(n, [(i, i + 1) for i in range(n - 1)])
    if kind == "clique":
        if n < 1:
            raise StructureError("clique needs n >= 1")
        return make_graph(n, list(itertools.combinations(range(n), 2)))
    if kind == "edgeless":
        if n < 0:
            raise StructureError("edgeless needs n >= 0")
        return make_graph(n, [])
    if kind == "dircycle":
        if n < 2:
            raise StructureError("dircycle needs n >= 2")
        return make_graph(n, [(i, (i + 1) % n) for i in range(n)], directed=True)
    if kind == "cycle":
        if n < 3:
            raise StructureError("cycle needs n >= 3")
        return make_graph(n, [(i, (i + 1) % n) for i in range(n)])
    if kind == "star":
        # n leaves attached to center 0; n+1 vertices
        if n < 1:
            raise StructureError("star needs n >= 1 leaves")
        return make_graph(n + 1, [(0, i) for i in range(1, n + 1)])
    if kind == "matching":
        # n disjoint edges, 2n vertices
        if n < 1:
            raise StructureError("matching needs n >= 1")
        return make_graph(2 * n, [(2 * i, 2 * i + 1) for i in range(n)])
    if kind == "one_edge":
        # exactly one edge on n vertices
        if n < 2:
            raise StructureError("one_edge needs n >= 2")
        return make_graph(n, [(0, 1)])
    if kind == "asym":
        return asymmetric_graph(n)
    if kind == "complete_bipartite":
        i, j = fam.index, fam.index2
        if i < 1 or j < 1:
            raise StructureError("complete_bipartite needs i,j >= 1")
        return make_graph(i + j, [(a, i + b) for a in range(i) for b in range(j)])
    if kind == "clique_pack":
        # n disjoint cliques of size n each
        if n < 1:
            raise StructureError("clique_pack needs n >= 1")
        edges = []
        for b in range(n):
            base = b * n
            edges.extend((base + a, base + c) for a, c in itertools.combinations(range(n), 2))
        return make_graph(n * n, edges)
    raise StructureError(f"unknown family kind {kind!r}")


def dirpath(n: int) -> Structure:
    return generate(FamilyId("dirpath", n))


def clique(n: int) -> Structure:
    return generate(FamilyId("clique", n))


def edgeless(n: int) -> Structure:
    return generate(FamilyId("edgeless", n))


# ---------------------------------------------------------------------------
# Automorphisms
# ---------------------------------------------------------------------------

def _refine_classes(g: Structure) -> List[int]:
    """Iterated degree refinement; returns a small integer color per vertex."""
    adj = g.adjacency()
    out_deg = [0] * g.n
    in_deg = [0] * g.n
    for (u, v) in g.rel("E"):
        out_deg[u] += 1
        in_deg[v] += 1
    pinned = {v: name for name, v in g.constants.items()}
    sig: List[tuple] = [
        (out_deg[v], in_deg[v], pinned.get(v, "")) for v in range(g.n)
    ]
    color = _compress(sig)
    for _ in range(g.n):
        sig = [
            (color[v], tuple(sorted(color[u] for u in adj[v])))
            for v in range(g.n)
        ]
        new_color = _compress(sig)
        if new_color == color:
            break
        color = new_color
    return color


def _compress(signatures: Sequence[tuple]) -> List[int]:
    table = {s: i for i, s in enumerate(sorted(set(signatures)))}
    return [table[s] for s in signatures]


def automorphism_count(g: Structure, bound: int = 12, limit: Optional[int] = None) -> int:
    """Exact automorphism count by backtracking over refinement classes.

    Constants are pinned (unique refinement class, so they map to themselves
    or to nothing).  The built-in order, when present, is the natural order
    and is deliberately not taken into account: callers get the plain graph
    automorphism count.  `limit` stops the search once that many
    automorphisms have been found (used by asymmetry checks).
    """
    if g.n > bound:
        raise SizeBoundError(f"automorphism search bound exceeded: {g.n} > {bound}")
    color = _refine_classes(g)
    arcs = g.rel("E")
    order = sorted(range(g.n), key=lambda v: (color[v], v))
    mapping = [-1] * g.n
    used = [False] * g.n
    count = 0

    def consistent(idx: int, v: int, w: int) -> bool:
        for u in order[:idx]:
            m = mapping[u]
            if ((v, u) in arcs) != ((w, m) in arcs):
                return False
            if ((u, v) in arcs) != ((m, w) in arcs):
                return False
        return True

    def extend(idx: int):
        nonlocal count
        if limit is not None and count >= limit:
            return
        if idx == g.n:
            count += 1
            return
        v = order[idx]
        for w in range(g.n):
            if used[w] or color[w] != color[v]:
                continue
            if not consistent(idx, v, w):
                continue
            mapping[v] = w
            used[w] = True
            extend(idx + 1)
            mapping[v] = -1
            used[w] = False
            if limit is not None and count >= limit:
                return

    extend(0)
    return count


def is_asymmetric(g: Structure, bound: int = 12) -> bool:
    return automorphism_count(g, bound=bound, limit=2) == 1


@lru_cache(maxsize=None)
def asymmetric_graph(n: int) -> Structure:
    """A canonical asymmetric (rigid) graph on n >= 6 vertices.

    n = 6: first rigid graph in ascending edge-bitmask order (deterministic).
    n > 6: the 6-vertex core with a pendant path attached at vertex 0;
    rigidity is re-verified at construction time.
    """
    if n < 6:
        raise StructureError("no asymmetric graph exists on 2..5 vertices; need n >= 6")
    if n == 6:
        pairs = list(itertools.combinations(range(6), 2))
        for mask in range(1 << len(pairs)):
            edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
            g = make_graph(6, edges)
            if is_asymmetric(g):
                return g
        raise AssertionError("unreachable: rigid graph on 6 vertices exists")
    core = asymmetric_graph(6)
    edges = list(core.edges())
    for v in range(6, n):
        edges.append((v - 1 if v > 6 else 0, v))
    g = make_graph(n, edges)
    if not is_asymmetric(g, bound=max(12, n)):
        raise AssertionError(f"pendant extension lost rigidity at n={n}")
    return g


# ---------------------------------------------------------------------------
# Incidence structure
# ---------------------------------------------------------------------------

INCIDENCE_VOC = Vocabulary(relations=(("V", 1), ("E", 1), ("R_inc", 2)))


def to_incidence(g: Structure) -> Structure:
    """Two-sorted incidence structure: |V|+|E| elements, each edge element incident to its 2 endpoints."""
    if not g.is_symmetric():
        raise StructureError("incidence conversion expects an undirected graph")
    edges = g.edges()
    n = g.n
    v_sort = {(i,) for i in range(n)}
    e_sort = {(n + k,) for k in range(len(edges))}
    inc = set()
    for k, (u, v) in enumerate(edges):
        inc.add((u, n + k))
        inc.add((v, n + k))
    return make_structure(INCIDENCE_VOC, n + len(edges),
                          {"V": v_sort, "E": e_sort, "R_inc": inc})


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------

def graph_to_text(g: Structure) -> str:
    """Line 1: `n m [directed] [ordered]`; then edges `u v`; then `label <name> <vertex>` lines."""
    directed = not g.is_symmetric()
    pairs = g.arcs() if directed else g.edges()
    head = f"{g.n} {len(pairs)}"
    if directed:
        head += " directed"
    if g.vocabulary.ordered:
        head += " ordered"
    lines = [head]
    lines += [f"{u} {v}" for (u, v) in pairs]
    lines += [f"label {name} {v}" for name, v in sorted(g.constants.items())]
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> Structure:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise StructureError("empty graph text")
    head = lines[0].split()
    if len(head) < 2:
        raise StructureError("header must be `n m [directed] [ordered]`")
    n, m = int(head[0]), int(head[1])
    directed = "directed" in head[2:]
    ordered = "ordered" in head[2:]
    edges = []
    labels: Dict[str, int] = {}
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] == "label":
            labels[parts[1]] = int(parts[2])
        else:
            edges.append((int(parts[0]), int(parts[1])))
    if len(edges) != m:
        raise StructureError(f"expected {m} edges, got {len(edges)}")
    return make_graph(n, edges, directed=directed, labels=labels, ordered=ordered)
