"""Binary gluing operations on structures and the quantifier-free
transduction engine (forward application and backward formula translation).

The product-based constructions on two directed paths are provided both as
fast direct graph builders (`phi_build`) and as transduction records over a
paired carrier structure (`paired_structure` + `PHI_F/T/B`); tests assert the
two code paths agree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from . import logic
from .logic import (And, Atom, DCount, Eq, Exists, Forall, Formula, FormulaError,
                    Iff, Less, Not, Or, Term, TrueF, FalseF, conj, disj)
from .structures import (Structure, StructureError, Vocabulary, dirpath,
                         make_graph, make_structure, drop_constants, with_labels)


class GluingError(ValueError):
    pass


def _require_same_vocabulary(a: Structure, b: Structure):
    if a.vocabulary.relations != b.vocabulary.relations or a.vocabulary.ordered != b.vocabulary.ordered:
        raise GluingError("vocabulary mismatch")


def disjoint_union(a: Structure, b: Structure) -> Structure:
    """Universe of A then B shifted; relations unioned.  Constants must be resolved by the caller."""
    _require_same_vocabulary(a, b)
    if a.constants or b.constants:
        raise GluingError("disjoint union of structures with constants is ambiguous; drop or resolve them first")
    rels = {}
    for sym, _ in a.vocabulary.relations:
        shifted = {tuple(x + a.n for x in t) for t in b.rel(sym)}
        rels[sym] = set(a.rel(sym)) | shifted
    voc = Vocabulary(a.vocabulary.relations, (), a.vocabulary.ordered)
    return make_structure(voc, a.n + b.n, rels)


def rich_disjoint_union(a: Structure, b: Structure) -> Structure:
    """Disjoint union plus unary block marks P1 (left) and P2 (right)."""
    base = disjoint_union(a, b)
    rels = {s: set(ts) for s, ts in base.relations.items()}
    rels["P1"] = {(i,) for i in range(a.n)}
    rels["P2"] = {(a.n + i,) for i in range(b.n)}
    voc = Vocabulary(base.vocabulary.relations + (("P1", 1), ("P2", 1)), (),
                     base.vocabulary.ordered)
    return make_structure(voc, base.n, rels)


def forget_marks(s: Structure) -> Structure:
    """Inverse of the block marking: drop P1/P2, recovering the plain union."""
    rels = {sym: set(ts) for sym, ts in s.relations.items() if sym not in ("P1", "P2")}
    voc = Vocabulary(tuple((r, k) for r, k in s.vocabulary.relations if r not in ("P1", "P2")),
                     s.vocabulary.constants, s.vocabulary.ordered)
    return make_structure(voc, s.n, rels, dict(s.constants))


def _label_names(a: Structure, b: Structure, k: int) -> List[str]:
    if k == 2 and all(c in g.constants for g in (a, b) for c in ("start", "end")):
        return ["start", "end"]
    names = [f"l{i}" for i in range(1, k + 1)]
    for name in names:
        if name not in a.constants or name not in b.constants:
            raise GluingError(f"missing label {name!r} for {k}-sum")
    return names


def k_sum(a: Structure, b: Structure, k: int) -> Structure:
    """Disjoint union with the k corresponding label vertices identified.

    Parallel edges collapse and self-loops arising from identification are
    dropped (simple-graph convention).  The result carries no labels.
    """
    names = _label_names(a, b, k)
    ident = {b.constants[name]: a.constants[name] for name in names}
    mapping = {}
    nxt = a.n
    for v in range(b.n):
        if v in ident:
            mapping[v] = ident[v]
        else:
            mapping[v] = nxt
            nxt += 1
    arcs = set(a.rel("E"))
    for (u, v) in b.rel("E"):
        mu, mv = mapping[u], mapping[v]
        if mu != mv:
            arcs.add((mu, mv))
    voc = Vocabulary((("E", 2),), (), a.vocabulary.ordered and b.vocabulary.ordered)
    return make_structure(voc, nxt, {"E": arcs})


def join(g: Structure, h: Structure) -> Structure:
    """Disjoint union plus all cross edges; undirected graphs only."""
    if not (g.is_symmetric() and h.is_symmetric()):
        raise GluingError("join requires undirected graphs")
    base = disjoint_union(drop_constants(g), drop_constants(h))
    arcs = set(base.rel("E"))
    for u in range(g.n):
        for v in range(h.n):
            arcs.add((u, g.n + v))
            arcs.add((g.n + v, u))
    return make_structure(base.vocabulary, base.n, {"E": arcs})


def mod_join(g: Structure, h: Structure) -> Structure:
    """Join of G and H, plus two extra copies of H pendant-attached to H.

    Universe: G (0..nG-1), H, then copy 1 and copy 2 of H; every H vertex u
    gets edges to its two copy images.
    """
    if not (g.is_symmetric() and h.is_symmetric()):
        raise GluingError("mod_join requires undirected graphs")
    ng, nh = g.n, h.n
    n = ng + 3 * nh
    edges = set(g.edges())
    edges |= {(ng + u, ng + v) for (u, v) in h.edges()}
    edges |= {(u, ng + v) for u in range(ng) for v in range(nh)}
    for copy in (1, 2):
        base = ng + copy * nh
        edges |= {(base + u, base + v) for (u, v) in h.edges()}
        edges |= {(ng + u, base + u) for u in range(nh)}
    return make_graph(n, edges)


def pair_index(a: Structure, b: Structure):
    """Row-major numbering of the product universe: (x, y) -> x*|B| + y."""
    def idx(x: int, y: int) -> int:
        return x * b.n + y
    return idx


def ordered_product(a: Structure, b: Structure) -> Structure:
    """Cartesian product with lexicographic order.

    R holds on a tuple of pairs iff it holds componentwise; the lexicographic
    order on pairs coincides with the natural order of the row-major
    numbering.  Constants present in both factors get paired.
    """
    if not (a.vocabulary.ordered and b.vocabulary.ordered):
        raise GluingError("ordered product requires ordered operands")
    _require_same_vocabulary(a, b)
    idx = pair_index(a, b)
    rels: Dict[str, set] = {}
    for sym, arity in a.vocabulary.relations:
        out = set()
        for ta in a.rel(sym):
            for tb in b.rel(sym):
                out.add(tuple(idx(x, y) for x, y in zip(ta, tb)))
        rels[sym] = out
    consts = {}
    for c in set(a.constants) & set(b.constants):
        consts[c] = idx(a.constants[c], b.constants[c])
    voc = Vocabulary(a.vocabulary.relations, tuple(sorted(consts)), True)
    return make_structure(voc, a.n * b.n, rels, consts)


# ---------------------------------------------------------------------------
# Direct constructions on two directed paths
# ---------------------------------------------------------------------------

def _sym_close(arcs: set) -> set:
    return arcs | {(v, u) for (u, v) in arcs}


def _product_diagonal_arcs(n1: int, n2: int) -> set:
    return {(i * n2 + j, (i + 1) * n2 + j + 1)
            for i in range(n1 - 1) for j in range(n2 - 1)}


def phi_build(which: str, n1: int, n2: int) -> Structure:
    """Undirected graph obtained from the two directed paths of n1 and n2 vertices.

    F: componentwise product edges plus the closing edge from the paired
       start to the paired end; has a unique cycle (of length n1) exactly
       when n1 = n2.
    T: product edges plus full first and last rows; a tree iff n1 = n2,
       connected iff n1 <= n2.
    B: product edges, first/last rows, first/last columns each missing one
       boundary edge, plus one extra chord; bridges appear iff n1 >= n2 + 1.
    P: the 2-sum of the symmetrically closed product with a 5-clique missing
       one edge; planar iff n1 != n2.
    """
    if n1 < 2 or n2 < 2:
        raise GluingError("path constructions need n1, n2 >= 2")
    if which == "F":
        arcs = _product_diagonal_arcs(n1, n2)
        arcs.add((0, (n1 - 1) * n2 + (n2 - 1)))
        return make_graph(n1 * n2, _sym_close(arcs))
    if which == "T":
        arcs = _product_diagonal_arcs(n1, n2)
        arcs |= {(j, j + 1) for j in range(n2 - 1)}                      # first row
        base = (n1 - 1) * n2
        arcs |= {(base + j, base + j + 1) for j in range(n2 - 1)}        # last row
        return make_graph(n1 * n2, _sym_close(arcs))
    if which == "B":
        arcs = _product_diagonal_arcs(n1, n2)
        arcs |= {(j, j + 1) for j in range(n2 - 1)}                      # first row
        base = (n1 - 1) * n2
        arcs |= {(base + j, base + j + 1) for j in range(n2 - 1)}        # last row
        arcs |= {(i * n2, (i + 1) * n2) for i in range(1, n1 - 1)}       # first column minus first edge
        arcs |= {(i * n2 + n2 - 1, (i + 1) * n2 + n2 - 1)
                 for i in range(0, n1 - 2)}                              # last column minus last edge
        arcs.add((1 * n2 + 0, (n1 - 2) * n2 + (n2 - 1)))                 # chord: second vertex of first
                                                                         # column to second-to-last of last
        return make_graph(n1 * n2, _sym_close(arcs))
    if which == "P":
        core = make_graph(
            5,
            [e for e in itertools.combinations(range(5), 2) if e != (3, 4)],
            labels={"start": 3, "end": 4},
        )
        arcs = _sym_close(_product_diagonal_arcs(n1, n2))
        prod = make_structure(
            Vocabulary((("E", 2),), ("end", "start")), n1 * n2, {"E": arcs},
            {"start": 0, "end": (n1 - 1) * n2 + (n2 - 1)},
        )
        return k_sum(core, prod, 2)
    raise GluingError(f"unknown construction {which!r}; expected F, T, P or B")


def attach_pendants(g: Structure, d: int) -> Structure:
    """Attach d-3 pendant leaves to every vertex; d = 3 is the identity."""
    if d < 3:
        raise GluingError("attach_pendants needs d >= 3")
    extra = d - 3
    edges = set(g.edges())
    n = g.n
    for v in range(g.n):
        for _ in range(extra):
            edges.add((v, n))
            n += 1
    return make_graph(n, edges)


# ---------------------------------------------------------------------------
# Transductions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Transduction:
    """Scalar definable interpretation: a universe formula over `x` and one
    defining formula per output relation over x1..xk."""
    name: str
    input_vocabulary: Vocabulary
    output_vocabulary: Vocabulary
    universe: Formula
    definitions: Dict[str, Formula]  # output symbol -> formula with free vars x1..xk

    def rank(self) -> int:
        ranks = [logic.quantifier_rank(self.universe)]
        ranks += [logic.quantifier_rank(f) for f in self.definitions.values()]
        return max(ranks)


def apply_transduction(t: Transduction, a: Structure) -> Structure:
    """Forward map: the structure defined inside `a`."""
    universe = [x for x in range(a.n) if logic.eval_formula(t.universe, a, {"x": x})]
    index = {x: i for i, x in enumerate(universe)}
    rels: Dict[str, set] = {}
    for sym, arity in t.output_vocabulary.relations:
        if sym not in t.definitions:
            raise GluingError(f"no defining formula for output symbol {sym!r}")
        formula = t.definitions[sym]
        out = set()
        for tup in itertools.product(universe, repeat=arity):
            env = {f"x{i+1}": v for i, v in enumerate(tup)}
            if logic.eval_formula(formula, a, env):
                out.add(tuple(index[v] for v in tup))
        rels[sym] = out
    consts = {}
    for c in t.output_vocabulary.constants:
        v = a.constants.get(c)
        if v is None or v not in index:
            raise GluingError(f"constant {c!r} not available in the defined universe")
        consts[c] = index[v]
    return make_structure(t.output_vocabulary, len(universe), rels, consts)


_FRESH = itertools.count()


def _freshen_bound(f: Formula) -> Formula:
    """Rename bound variables so substitution cannot capture argument names."""
    if isinstance(f, (TrueF, FalseF, Atom, Eq, Less)):
        return f
    if isinstance(f, Not):
        return Not(_freshen_bound(f.sub))
    if isinstance(f, (And, Or, Iff)):
        return type(f)(_freshen_bound(f.left), _freshen_bound(f.right))
    if isinstance(f, (Exists, Forall)):
        fresh = f"_b{next(_FRESH)}"
        body = logic.substitute_terms(_freshen_bound(f.sub), {f.var: fresh})
        return type(f)(fresh, body)
    if isinstance(f, DCount):
        fresh = f"_b{next(_FRESH)}"
        body = logic.substitute_terms(_freshen_bound(f.sub), {f.var: fresh})
        return DCount(f.modulus, f.residue, fresh, body)
    raise FormulaError(f"unknown node {f!r}")


def backward_translate(t: Transduction, theta: Formula) -> Formula:
    """Formula over the input vocabulary whose truth on A equals the truth of
    theta on the transduced structure: atoms are replaced by their defining
    formulas and quantifiers are relativized to the universe formula."""
    def rel_univ(var: str) -> Formula:
        return logic.substitute_terms(_freshen_bound(t.universe), {"x": var})

    def go(f: Formula) -> Formula:
        if isinstance(f, (TrueF, FalseF)):
            return f
        if isinstance(f, Atom):
            if f.rel not in t.definitions:
                raise GluingError(f"atom over unknown output symbol {f.rel!r}")
            d = _freshen_bound(t.definitions[f.rel])
            mapping = {f"x{i+1}": a.name for i, a in enumerate(f.args)}
            return logic.substitute_terms(d, mapping)
        if isinstance(f, (Eq, Less)):
            return f
        if isinstance(f, Not):
            return Not(go(f.sub))
        if isinstance(f, (And, Or, Iff)):
            return type(f)(go(f.left), go(f.right))
        if isinstance(f, Exists):
            return Exists(f.var, And(rel_univ(f.var), go(f.sub)))
        if isinstance(f, Forall):
            return Forall(f.var, Or(Not(rel_univ(f.var)), go(f.sub)))
        if isinstance(f, DCount):
            return DCount(f.modulus, f.residue, f.var, And(rel_univ(f.var), go(f.sub)))
        raise FormulaError(f"unknown node {f!r}")

    return go(theta)


# ---------------------------------------------------------------------------
# Paired carrier for the path constructions
# ---------------------------------------------------------------------------

PAIRED_VOC = Vocabulary(
    relations=(("E1", 2), ("E2", 2), ("Eq1", 2), ("Eq2", 2)),
    constants=("end", "start"),
    ordered=True,
)


def paired_structure(a: Structure, b: Structure) -> Structure:
    """Both input graphs overlaid on the product universe: E1/E2 are the
    componentwise edge relations, Eq1/Eq2 componentwise equality."""
    for g in (a, b):
        if "start" not in g.constants or "end" not in g.constants:
            raise GluingError("paired carrier expects start/end labeled operands")
    idx = pair_index(a, b)
    pairs = [(x, y) for x in range(a.n) for y in range(b.n)]
    e1 = {(idx(x1, y1), idx(x2, y2))
          for (x1, y1) in pairs for (x2, y2) in pairs if (x1, x2) in a.rel("E")}
    e2 = {(idx(x1, y1), idx(x2, y2))
          for (x1, y1) in pairs for (x2, y2) in pairs if (y1, y2) in b.rel("E")}
    eq1 = {(idx(x1, y1), idx(x1, y2)) for x1 in range(a.n)
           for y1 in range(b.n) for y2 in range(b.n)}
    eq2 = {(idx(x1, y1), idx(x2, y1)) for y1 in range(b.n)
           for x1 in range(a.n) for x2 in range(a.n)}
    consts = {"start": idx(a.constants["start"], b.constants["start"]),
              "end": idx(a.constants["end"], b.constants["end"])}
    return make_structure(PAIRED_VOC, a.n * b.n,
                          {"E1": e1, "E2": e2, "Eq1": eq1, "Eq2": eq2}, consts)


GRAPH_OUT = Vocabulary(relations=(("E", 2),))


def _sym(formula_text: str) -> Formula:
    """Symmetric closure of a two-variable edge description."""
    f = logic.parse(formula_text)
    swapped = logic.substitute_terms(f, {"x1": "x2", "x2": "x1"})
    return Or(f, swapped)


def _transduction(name: str, in_voc: Vocabulary, defs: Dict[str, Formula],
                  universe: Optional[Formula] = None,
                  out_voc: Vocabulary = GRAPH_OUT) -> Transduction:
    return Transduction(name, in_voc, out_voc, universe or TrueF(), defs)


IDENTITY = _transduction("identity", GRAPH_OUT, {"E": logic.parse("E(x1,x2)")})

PHI_SYM = _transduction("sym_closure", GRAPH_OUT,
                        {"E": logic.parse("E(x1,x2) | E(x2,x1)")})

PHI_F = _transduction(
    "product_with_closing_edge", PAIRED_VOC,
    {"E": _sym("(E1(x1,x2) & E2(x1,x2)) | (x1 = start & x2 = end)")},
)

PHI_T = _transduction(
    "product_with_boundary_rows", PAIRED_VOC,
    {"E": _sym("(E1(x1,x2) & E2(x1,x2))"
               " | (Eq1(x1,x2) & Eq1(x1,start) & E2(x1,x2))"
               " | (Eq1(x1,x2) & Eq1(x1,end) & E2(x1,x2))")},
)

PHI_B = _transduction(
    "product_with_boundary_frame", PAIRED_VOC,
    {"E": _sym("(E1(start,x1) & E1(x2,end) & Eq2(x1,start) & Eq2(x2,end))"
               " | (E1(x1,x2) & E2(x1,x2))"
               " | (Eq1(x1,x2) & Eq1(x1,start) & E2(x1,x2))"
               " | (Eq2(x1,x2) & Eq2(x1,start) & E1(x1,x2) & !Eq1(x1,start))"
               " | (Eq1(x1,x2) & Eq1(x1,end) & E2(x1,x2))"
               " | (Eq2(x1,x2) & Eq2(x1,end) & E1(x1,x2) & !Eq1(x2,end))")},
)

REGISTERED_TRANSDUCTIONS: Dict[str, Transduction] = {
    t.name: t for t in (IDENTITY, PHI_SYM, PHI_F, PHI_T, PHI_B)
}


def phi_via_transduction(which: str, n1: int, n2: int) -> Structure:
    """Slow path for F/T/B: apply the transduction record to the paired carrier."""
    record = {"F": PHI_F, "T": PHI_T, "B": PHI_B}.get(which)
    if record is None:
        raise GluingError(f"no transduction record for {which!r}")
    return apply_transduction(record, paired_structure(dirpath(n1), dirpath(n2)))


# ---------------------------------------------------------------------------
# Stable operation ids for experiment configs
# ---------------------------------------------------------------------------

def get_operation(op_id: str):
    """Resolve a stable string id to a binary gluing callable."""
    if op_id == "disjoint_union":
        return disjoint_union
    if op_id == "rich_disjoint_union":
        return rich_disjoint_union
    if op_id == "join":
        return join
    if op_id == "mod_join":
        return mod_join
    if op_id == "product":
        return ordered_product
    if op_id.startswith("ksum:"):
        k = int(op_id.split(":", 1)[1])
        return lambda a, b: k_sum(a, b, k)
    if op_id.startswith("phi:"):
        which = op_id.split(":", 1)[1]
        return lambda a, b: phi_build(which, a, b)  # operands are path sizes
    raise GluingError(f"unknown operation id {op_id!r}")
