"""Reduction-sequence compiler: translates a sentence with modular counting
quantifiers over ordered graphs into formulas evaluated on the two factors of
an ordered product (or the two blocks of a rich disjoint union) plus a
Boolean combiner over the component truth values.

Atoms on the product reduce componentwise; the order atom uses the
lexicographic rule.  Quantifiers are handled by expanding the subformula's
combiner into a truth table (total disjunctive normal form), building the
mutually exclusive pattern conjunctions, and counting pattern witnesses per
factor with modular counting quantifiers.  Combiners for counting
quantifiers enumerate residue-class subsets explicitly; an explicit blow-up
guard rejects inputs where that enumeration would be astronomically large.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from . import logic
from .logic import (And, Atom, DCount, Eq, Exists, FalseF, Forall, Formula,
                    Iff, Less, Not, Or, Term, TrueF, conj)
from .structures import Structure

SUPPORTED_MODULI = (2, 3)
MAX_TABLE_VARS = 18          # truth-table expansion limit: 2^18 rows
MAX_D2_PATTERNS = 12         # even-subset enumeration limit: 2^12 subsets
MAX_D3_PATTERNS = 6          # disjoint-4-tuple enumeration limit: 5^6 tuples


class ReductionError(ValueError):
    pass


class BlowupError(ReductionError):
    """The literal combiner enumeration would exceed the configured bounds."""


# ---------------------------------------------------------------------------
# Boolean combiner expressions over component truth vectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BExpr:
    def node_count(self) -> int:
        raise NotImplementedError


@dataclass(frozen=True)
class BVar(BExpr):
    side: int   # 0 = left component, 1 = right component
    index: int

    def node_count(self):
        return 1

    def __str__(self):
        return f"b{'12'[self.side]}_{self.index + 1}"


@dataclass(frozen=True)
class BConst(BExpr):
    value: bool

    def node_count(self):
        return 1

    def __str__(self):
        return "true" if self.value else "false"


@dataclass(frozen=True)
class BNot(BExpr):
    sub: BExpr

    def node_count(self):
        return 1 + self.sub.node_count()

    def __str__(self):
        return f"!{_paren(self.sub)}"


@dataclass(frozen=True)
class BAnd(BExpr):
    parts: Tuple[BExpr, ...]

    def node_count(self):
        return 1 + sum(p.node_count() for p in self.parts)

    def __str__(self):
        return "(" + " & ".join(str(p) for p in self.parts) + ")" if self.parts else "true"


@dataclass(frozen=True)
class BOr(BExpr):
    parts: Tuple[BExpr, ...]

    def node_count(self):
        return 1 + sum(p.node_count() for p in self.parts)

    def __str__(self):
        return "(" + " | ".join(str(p) for p in self.parts) + ")" if self.parts else "false"


def _paren(e: BExpr) -> str:
    return str(e)


def band(parts: Sequence[BExpr]) -> BExpr:
    flat: List[BExpr] = []
    for p in parts:
        if isinstance(p, BConst):
            if not p.value:
                return BConst(False)
        elif isinstance(p, BAnd):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if not flat:
        return BConst(True)
    if len(flat) == 1:
        return flat[0]
    return BAnd(tuple(flat))


def bor(parts: Sequence[BExpr]) -> BExpr:
    flat: List[BExpr] = []
    for p in parts:
        if isinstance(p, BConst):
            if p.value:
                return BConst(True)
        elif isinstance(p, BOr):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if not flat:
        return BConst(False)
    if len(flat) == 1:
        return flat[0]
    return BOr(tuple(flat))


def bnot(e: BExpr) -> BExpr:
    if isinstance(e, BConst):
        return BConst(not e.value)
    if isinstance(e, BNot):
        return e.sub
    return BNot(e)


def beval(e: BExpr, left: Sequence[bool], right: Sequence[bool]) -> bool:
    if isinstance(e, BVar):
        return left[e.index] if e.side == 0 else right[e.index]
    if isinstance(e, BConst):
        return e.value
    if isinstance(e, BNot):
        return not beval(e.sub, left, right)
    if isinstance(e, BAnd):
        return all(beval(p, left, right) for p in e.parts)
    if isinstance(e, BOr):
        return any(beval(p, left, right) for p in e.parts)
    raise ReductionError(f"unknown combiner node {e!r}")


def _remap(e: BExpr, left_map: Dict[int, int], right_map: Dict[int, int]) -> BExpr:
    if isinstance(e, BVar):
        return BVar(e.side, left_map[e.index] if e.side == 0 else right_map[e.index])
    if isinstance(e, BConst):
        return e
    if isinstance(e, BNot):
        return BNot(_remap(e.sub, left_map, right_map))
    if isinstance(e, BAnd):
        return BAnd(tuple(_remap(p, left_map, right_map) for p in e.parts))
    if isinstance(e, BOr):
        return BOr(tuple(_remap(p, left_map, right_map) for p in e.parts))
    raise ReductionError(f"unknown combiner node {e!r}")


# ---------------------------------------------------------------------------
# Reduction sequences
# ---------------------------------------------------------------------------

@dataclass
class ReductionSequence:
    left: List[Formula]
    right: List[Formula]
    combiner: BExpr

    def stats(self) -> Dict[str, int]:
        return {
            "left_formulas": len(self.left),
            "right_formulas": len(self.right),
            "combiner_nodes": self.combiner.node_count(),
        }

    def describe(self) -> str:
        lines = ["left:"]
        lines += [f"  psi1_{i+1} = {f}" for i, f in enumerate(self.left)]
        lines.append("right:")
        lines += [f"  psi2_{i+1} = {f}" for i, f in enumerate(self.right)]
        lines.append(f"combiner: {self.combiner}")
        s = self.stats()
        lines.append(f"sizes: {s['left_formulas']} left, {s['right_formulas']} right, "
                     f"{s['combiner_nodes']} combiner nodes")
        return "\n".join(lines)


def _dedup(rs: ReductionSequence) -> ReductionSequence:
    """Deduplicate component formulas by syntactic equality, remapping the combiner."""
    def compress(formulas: List[Formula]):
        seen: Dict[Formula, int] = {}
        out: List[Formula] = []
        mapping: Dict[int, int] = {}
        for i, f in enumerate(formulas):
            if f not in seen:
                seen[f] = len(out)
                out.append(f)
            mapping[i] = seen[f]
        return out, mapping

    left, lmap = compress(rs.left)
    right, rmap = compress(rs.right)
    return ReductionSequence(left, right, _remap(rs.combiner, lmap, rmap))


def _concat(a: ReductionSequence, b: ReductionSequence):
    """Concatenate sequences; returns the combined RS and b's remapped combiner."""
    lmap = {i: i + len(a.left) for i in range(len(b.left))}
    rmap = {i: i + len(a.right) for i in range(len(b.right))}
    comb_b = _remap(b.combiner, lmap, rmap)
    return ReductionSequence(a.left + b.left, a.right + b.right, a.combiner), comb_b


def _satisfying_patterns(rs: ReductionSequence) -> List[Tuple[Tuple[bool, ...], Tuple[bool, ...]]]:
    """Total truth-table rows of the combiner that evaluate to true."""
    nl, nr = len(rs.left), len(rs.right)
    if nl + nr > MAX_TABLE_VARS:
        raise BlowupError(f"truth-table expansion over {nl + nr} variables exceeds "
                          f"the {MAX_TABLE_VARS}-variable bound")
    out = []
    for bits in itertools.product((False, True), repeat=nl + nr):
        lbits, rbits = bits[:nl], bits[nl:]
        if beval(rs.combiner, lbits, rbits):
            out.append((lbits, rbits))
    return out


def _pattern_formula(formulas: Sequence[Formula], bits: Sequence[bool]) -> Formula:
    parts = [f if b else Not(f) for f, b in zip(formulas, bits)]
    return conj(parts)


def _normalize(f: Formula) -> Formula:
    """Eliminate Forall and Iff so the compiler core sees And/Or/Not/Exists/DCount."""
    if isinstance(f, (TrueF, FalseF, Atom, Eq, Less)):
        return f
    if isinstance(f, Not):
        return Not(_normalize(f.sub))
    if isinstance(f, And):
        return And(_normalize(f.left), _normalize(f.right))
    if isinstance(f, Or):
        return Or(_normalize(f.left), _normalize(f.right))
    if isinstance(f, Iff):
        a, b = _normalize(f.left), _normalize(f.right)
        return Or(And(a, b), And(Not(a), Not(b)))
    if isinstance(f, Exists):
        return Exists(f.var, _normalize(f.sub))
    if isinstance(f, Forall):
        return Not(Exists(f.var, Not(_normalize(f.sub))))
    if isinstance(f, DCount):
        return DCount(f.modulus, f.residue, f.var, _normalize(f.sub))
    raise ReductionError(f"unknown node {f!r}")


# ---------------------------------------------------------------------------
# Ordered product
# ---------------------------------------------------------------------------

def reduce_product(phi: Formula) -> ReductionSequence:
    """Reduction sequence for the ordered (Cartesian, lexicographic) product.

    Correctness contract: phi holds on A x B iff the combiner holds on the
    truth vectors of the component formulas on A and on B.  Counting moduli
    are restricted to 2 and 3.
    """
    _check_moduli(phi)
    return _dedup(_reduce_product(_normalize(phi)))


def _reduce_product(f: Formula) -> ReductionSequence:
    if isinstance(f, TrueF):
        return ReductionSequence([], [], BConst(True))
    if isinstance(f, FalseF):
        return ReductionSequence([], [], BConst(False))
    if isinstance(f, (Atom, Eq)):
        return ReductionSequence([f], [f], band([BVar(0, 0), BVar(1, 0)]))
    if isinstance(f, Less):
        eq = Eq(f.left, f.right)
        return ReductionSequence(
            [f, eq], [f, eq],
            bor([BVar(0, 0), band([BVar(0, 1), BVar(1, 0)])]))
    if isinstance(f, Not):
        rs = _reduce_product(f.sub)
        return ReductionSequence(rs.left, rs.right, bnot(rs.combiner))
    if isinstance(f, (And, Or)):
        ra = _reduce_product(f.left)
        rb = _reduce_product(f.right)
        merged, comb_b = _concat(ra, rb)
        op = band if isinstance(f, And) else bor
        return _dedup(ReductionSequence(merged.left, merged.right,
                                        op([merged.combiner, comb_b])))
    if isinstance(f, Exists):
        rs = _dedup(_reduce_product(f.sub))
        patterns = _satisfying_patterns(rs)
        left, right, clauses = [], [], []
        for (lbits, rbits) in patterns:
            left.append(Exists(f.var, _pattern_formula(rs.left, lbits)))
            right.append(Exists(f.var, _pattern_formula(rs.right, rbits)))
            clauses.append(band([BVar(0, len(left) - 1), BVar(1, len(right) - 1)]))
        return _dedup(ReductionSequence(left, right, bor(clauses)))
    if isinstance(f, DCount):
        rs = _dedup(_reduce_product(f.sub))
        patterns = _satisfying_patterns(rs)
        if f.modulus == 2:
            return _product_d2(f, rs, patterns)
        return _product_d3(f, rs, patterns)
    raise ReductionError(f"unsupported node {f!r}")


def _product_d2(f: DCount, rs: ReductionSequence, patterns) -> ReductionSequence:
    """Parity of the witness count on the product: the number of patterns
    with odd witness counts on both sides must be congruent to the residue."""
    if len(patterns) > MAX_D2_PATTERNS:
        raise BlowupError(f"{len(patterns)} satisfying patterns exceed the even-subset "
                          f"enumeration bound {MAX_D2_PATTERNS}")
    left, right = [], []
    for (lbits, rbits) in patterns:
        left.append(DCount(2, 0, f.var, _pattern_formula(rs.left, lbits)))
        right.append(DCount(2, 0, f.var, _pattern_formula(rs.right, rbits)))
    j = len(patterns)
    clauses = []
    for t in _subsets(range(j)):
        if len(t) % 2 != f.residue:
            continue
        parts: List[BExpr] = []
        for idx in range(j):
            if idx in t:
                parts.append(band([bnot(BVar(0, idx)), bnot(BVar(1, idx))]))
            else:
                parts.append(bor([BVar(0, idx), BVar(1, idx)]))
        clauses.append(band(parts))
    return _dedup(ReductionSequence(left, right, bor(clauses)))


def _product_d3(f: DCount, rs: ReductionSequence, patterns) -> ReductionSequence:
    """Residue of the witness count modulo 3 via residue classes of the
    per-pattern counts on each side."""
    if len(patterns) > MAX_D3_PATTERNS:
        raise BlowupError(f"{len(patterns)} satisfying patterns exceed the disjoint-subset "
                          f"enumeration bound {MAX_D3_PATTERNS}")
    left, right = [], []
    for (lbits, rbits) in patterns:
        for r in range(3):
            left.append(DCount(3, r, f.var, _pattern_formula(rs.left, lbits)))
            right.append(DCount(3, r, f.var, _pattern_formula(rs.right, rbits)))

    def var(side: int, j: int, r: int) -> BExpr:
        return BVar(side, 3 * j + r)

    j_count = len(patterns)
    clauses = []
    # assign each pattern one of: unused (product residue 0), T11, T12, T21, T22
    for assignment in itertools.product(range(5), repeat=j_count):
        total = 0
        for state in assignment:
            total += (0, 1, 2, 2, 1)[state]  # |T11|+2|T12|+2|T21|+|T22| contributions
        if total % 3 != f.residue:
            continue
        parts: List[BExpr] = []
        for j, state in enumerate(assignment):
            if state == 0:
                parts.append(bor([var(0, j, 0), var(1, j, 0)]))
            elif state == 1:   # T11: both counts congruent to 1
                parts.append(band([var(0, j, 1), var(1, j, 1)]))
            elif state == 2:   # T12: left 1, right 2
                parts.append(band([var(0, j, 1), var(1, j, 2)]))
            elif state == 3:   # T21: left 2, right 1
                parts.append(band([var(0, j, 2), var(1, j, 1)]))
            else:              # T22: both 2
                parts.append(band([var(0, j, 2), var(1, j, 2)]))
        clauses.append(band(parts))
    return _dedup(ReductionSequence(left, right, bor(clauses)))


def _subsets(items):
    items = list(items)
    for r in range(len(items) + 1):
        yield from (set(c) for c in itertools.combinations(items, r))


def _check_moduli(f: Formula):
    if isinstance(f, DCount):
        if f.modulus not in SUPPORTED_MODULI:
            raise ReductionError(f"unsupported counting modulus {f.modulus}; supported: {SUPPORTED_MODULI}")
        _check_moduli(f.sub)
    elif isinstance(f, Not):
        _check_moduli(f.sub)
    elif isinstance(f, (And, Or, Iff)):
        _check_moduli(f.left)
        _check_moduli(f.right)
    elif isinstance(f, (Exists, Forall)):
        _check_moduli(f.sub)


# ---------------------------------------------------------------------------
# Rich disjoint union
# ---------------------------------------------------------------------------

def reduce_union(phi: Formula, blocks: Optional[Dict[str, int]] = None) -> ReductionSequence:
    """Reduction sequence for the rich disjoint union of ordered structures.

    Every element belongs to one block; order atoms use the convention that
    left-block elements precede right-block elements.  `blocks` assigns free
    variables to blocks (0 = left, 1 = right); sentences need none.
    Constants are not supported for the union.
    """
    _check_moduli(phi)
    blocks = dict(blocks or {})
    free = phi.free_vars()
    if not free <= set(blocks):
        raise ReductionError(f"free variables without a block assignment: {sorted(free - set(blocks))}")
    return _dedup(_reduce_union(_normalize(phi), blocks))


def _term_side(t: Term, blocks: Dict[str, int]) -> int:
    if t.name not in blocks:
        raise ReductionError(f"constants are not supported in union reductions: {t.name!r}")
    return blocks[t.name]


def _reduce_union(f: Formula, blocks: Dict[str, int]) -> ReductionSequence:
    if isinstance(f, TrueF):
        return ReductionSequence([], [], BConst(True))
    if isinstance(f, FalseF):
        return ReductionSequence([], [], BConst(False))
    if isinstance(f, Atom):
        sides = {_term_side(t, blocks) for t in f.args}
        if len(sides) > 1:
            return ReductionSequence([], [], BConst(False))
        side = sides.pop()
        return _component_atom(f, side)
    if isinstance(f, Eq):
        s1, s2 = _term_side(f.left, blocks), _term_side(f.right, blocks)
        if s1 != s2:
            return ReductionSequence([], [], BConst(False))
        return _component_atom(f, s1)
    if isinstance(f, Less):
        s1, s2 = _term_side(f.left, blocks), _term_side(f.right, blocks)
        if s1 == s2:
            return _component_atom(f, s1)
        # left block precedes right block
        return ReductionSequence([], [], BConst(s1 == 0 and s2 == 1))
    if isinstance(f, Not):
        rs = _reduce_union(f.sub, blocks)
        return ReductionSequence(rs.left, rs.right, bnot(rs.combiner))
    if isinstance(f, (And, Or)):
        ra = _reduce_union(f.left, blocks)
        rb = _reduce_union(f.right, blocks)
        merged, comb_b = _concat(ra, rb)
        op = band if isinstance(f, And) else bor
        return _dedup(ReductionSequence(merged.left, merged.right,
                                        op([merged.combiner, comb_b])))
    if isinstance(f, Exists):
        branches = []
        for side in (0, 1):
            rs = _dedup(_reduce_union(f.sub, {**blocks, f.var: side}))
            branches.append((side, rs, _satisfying_patterns(rs)))
        left: List[Formula] = []
        right: List[Formula] = []
        exprs: List[BExpr] = []
        for side, rs, patterns in branches:
            own, other = (rs.left, rs.right) if side == 0 else (rs.right, rs.left)
            own_out, other_out = (left, right) if side == 0 else (right, left)
            other_base = len(other_out)
            other_out.extend(other)
            for (lbits, rbits) in patterns:
                own_bits, other_bits = (lbits, rbits) if side == 0 else (rbits, lbits)
                own_out.append(Exists(f.var, _pattern_formula(own, own_bits)))
                witness = BVar(side, len(own_out) - 1)
                gamma = band([
                    BVar(1 - side, other_base + i) if b else bnot(BVar(1 - side, other_base + i))
                    for i, b in enumerate(other_bits)
                ])
                exprs.append(band([witness, gamma]))
        return _dedup(ReductionSequence(left, right, bor(exprs)))
    if isinstance(f, DCount):
        if f.modulus not in SUPPORTED_MODULI:
            raise ReductionError(f"unsupported counting modulus {f.modulus}")
        m = f.modulus
        left: List[Formula] = []
        right: List[Formula] = []
        side_residue_exprs = []
        for side in (0, 1):
            rs = _dedup(_reduce_union(f.sub, {**blocks, f.var: side}))
            patterns = _satisfying_patterns(rs)
            own, other = (rs.left, rs.right) if side == 0 else (rs.right, rs.left)
            own_out, other_out = (left, right) if side == 0 else (right, left)
            other_base = len(other_out)
            other_out.extend(other)
            # group satisfying patterns by their own-side pattern
            groups: Dict[Tuple[bool, ...], List[Tuple[bool, ...]]] = {}
            for (lbits, rbits) in patterns:
                own_bits, other_bits = (lbits, rbits) if side == 0 else (rbits, lbits)
                groups.setdefault(own_bits, []).append(other_bits)
            if len(groups) > (MAX_D2_PATTERNS if m == 2 else MAX_D3_PATTERNS):
                raise BlowupError(f"{len(groups)} own-side patterns exceed the union "
                                  f"residue enumeration bound")
            entries = []
            for own_bits, other_patterns in sorted(groups.items()):
                base = len(own_out)
                for r in range(m):
                    own_out.append(DCount(m, r, f.var, _pattern_formula(own, own_bits)))
                active = bor([
                    band([
                        BVar(1 - side, other_base + i) if b else bnot(BVar(1 - side, other_base + i))
                        for i, b in enumerate(other_bits)
                    ])
                    for other_bits in other_patterns
                ])
                count_vars = [BVar(side, base + r) for r in range(m)]
                entries.append((active, count_vars))
            side_residue_exprs.append(_residue_exprs(entries, m))
        clauses = []
        for ra in range(m):
            rb = (f.residue - ra) % m
            clauses.append(band([side_residue_exprs[0][ra], side_residue_exprs[1][rb]]))
        return _dedup(ReductionSequence(left, right, bor(clauses)))
    raise ReductionError(f"unsupported node {f!r}")


def _component_atom(f: Formula, side: int) -> ReductionSequence:
    if side == 0:
        return ReductionSequence([f], [], BVar(0, 0))
    return ReductionSequence([], [f], BVar(1, 0))


def _residue_exprs(entries, m: int) -> List[BExpr]:
    """For contributions t_p = (active_p ? count_p : 0), build expressions
    stating sum(t_p) is congruent to r modulo m, for each r."""
    out = []
    for target in range(m):
        clauses = []
        for vector in itertools.product(range(m), repeat=len(entries)):
            if sum(vector) % m != target:
                continue
            parts = []
            for (active, count_vars), r in zip(entries, vector):
                contrib = band([active, count_vars[r]])
                if r == 0:
                    contrib = bor([contrib, bnot(active)])
                parts.append(contrib)
            clauses.append(band(parts))
        out.append(bor(clauses))
    return out


# ---------------------------------------------------------------------------
# Evaluation through a reduction sequence
# ---------------------------------------------------------------------------

def eval_via_reduction(rs: ReductionSequence, a: Structure, b: Structure,
                       env_a: Optional[Dict[str, int]] = None,
                       env_b: Optional[Dict[str, int]] = None,
                       cache: Optional[Dict] = None) -> bool:
    """Evaluate the component formula vectors on the factors, then the combiner."""
    def vec(formulas, s, env):
        vals = []
        for f in formulas:
            if cache is not None and not env:
                key = (id(f), s.key())
                if key not in cache:
                    cache[key] = logic.eval_formula(f, s)
                vals.append(cache[key])
            else:
                vals.append(logic.eval_formula(f, s, env))
        return vals

    return beval(rs.combiner, vec(rs.left, a, env_a), vec(rs.right, b, env_b))
