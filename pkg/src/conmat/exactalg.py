"""Exact linear algebra over the rationals and over polynomial rings, plus
the connection-matrix builder with rank profiles.

Rank is computed by fraction-free (Bareiss) elimination: rational entries are
scaled to integers row-wise, polynomial entries are eliminated directly in
the polynomial ring.  No floating point is used anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from .polynomial import Poly

Entry = Union[int, bool, Fraction, Poly]


class MatrixError(ValueError):
    pass


@dataclass
class Matrix:
    rows: int
    cols: int
    entries: List[List[Entry]]
    row_labels: Tuple[str, ...] = ()
    col_labels: Tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise MatrixError("ragged matrix")
        kinds = {_kind(e) for row in self.entries for e in row}
        if len(kinds) > 1:
            raise MatrixError(f"mixed entry kinds: {sorted(kinds)}")
        self.kind = kinds.pop() if kinds else "scalar"

    def entry(self, i: int, j: int) -> Entry:
        return self.entries[i][j]

    def leading(self, n: int) -> "Matrix":
        if n > min(self.rows, self.cols):
            raise MatrixError("leading submatrix larger than matrix")
        return Matrix(n, n, [row[:n] for row in self.entries[:n]],
                      self.row_labels[:n], self.col_labels[:n])

    def transpose(self) -> "Matrix":
        return Matrix(self.cols, self.rows,
                      [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)],
                      self.col_labels, self.row_labels)

    def to_csv(self) -> str:
        lines = []
        if self.col_labels:
            lines.append(",".join([""] + [str(c) for c in self.col_labels]))
        for i, row in enumerate(self.entries):
            label = [str(self.row_labels[i])] if self.row_labels else []
            lines.append(",".join(label + [entry_str(e) for e in row]))
        return "\n".join(lines) + "\n"


def entry_str(e: Entry) -> str:
    if isinstance(e, bool):
        return "1" if e else "0"
    if isinstance(e, Fraction):
        return str(e.numerator) if e.denominator == 1 else f"{e.numerator}/{e.denominator}"
    return str(e)


def _kind(e: Entry) -> str:
    if isinstance(e, Poly):
        return "poly"
    if isinstance(e, (bool, int, Fraction)):
        return "scalar"
    raise MatrixError(f"unsupported entry type {type(e).__name__}")


def _normalize_rows(m: Matrix) -> List[List]:
    """Booleans to 0/1; rationals cleared to integers; polynomials to integer coefficients."""
    out = []
    for row in m.entries:
        if m.kind == "poly":
            polys = [e if isinstance(e, Poly) else Poly.const(int(e) if isinstance(e, bool) else e)
                     for e in row]
            dens = [Fraction(c).denominator for p in polys for c in p.coeffs] or [1]
            mlt = lcm(*dens)
            out.append([Poly([int(Fraction(c) * mlt) for c in p.coeffs]) for p in polys])
        else:
            vals = [Fraction(int(e) if isinstance(e, bool) else e) for e in row]
            dens = [v.denominator for v in vals] or [1]
            mlt = lcm(*dens)
            out.append([int(v * mlt) for v in vals])
    return out


def _is_zero(e) -> bool:
    return e.is_zero() if isinstance(e, Poly) else e == 0


def _pivot_weight(e) -> tuple:
    if isinstance(e, Poly):
        return (e.degree, max(abs(int(c)) for c in e.coeffs))
    return (0, abs(e))


def _exact_div(a, b):
    if isinstance(a, Poly) or isinstance(b, Poly):
        a = a if isinstance(a, Poly) else Poly.const(a)
        return a.exact_div(b)
    q, r = divmod(a, b)
    if r:
        raise ArithmeticError("inexact integer division in Bareiss step")
    return q


def rank(m: Matrix) -> int:
    """Exact rank via fraction-free Bareiss elimination.

    Pivots are chosen with the lowest degree / smallest magnitude among the
    candidate column to limit coefficient growth.
    """
    a = _normalize_rows(m)
    n_rows, n_cols = m.rows, m.cols
    prev = 1
    r = 0
    col = 0
    while r < n_rows and col < n_cols:
        candidates = [i for i in range(r, n_rows) if not _is_zero(a[i][col])]
        if not candidates:
            col += 1
            continue
        piv = min(candidates, key=lambda i: _pivot_weight(a[i][col]))
        if piv != r:
            a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, n_rows):
            for j in range(col + 1, n_cols):
                num = a[r][col] * a[i][j] - a[i][col] * a[r][j]
                a[i][j] = _exact_div(num, prev)
            a[i][col] = 0 if not isinstance(a[i][col], Poly) else Poly(())
        prev = a[r][col]
        r += 1
        col += 1
    return r


# ---------------------------------------------------------------------------
# Rank profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    """Expected / observed shape of a rank profile."""
    kind: str              # bounded | full_diagonal_growth | strictly_increasing | custom
    bound: Optional[int] = None
    profile: Optional[Tuple[int, ...]] = None

    @staticmethod
    def bounded(c: int) -> "Verdict":
        return Verdict("bounded", bound=c)

    @staticmethod
    def full_diagonal_growth() -> "Verdict":
        return Verdict("full_diagonal_growth")

    @staticmethod
    def strictly_increasing() -> "Verdict":
        return Verdict("strictly_increasing")

    @staticmethod
    def custom(profile: Sequence[int]) -> "Verdict":
        return Verdict("custom", profile=tuple(profile))

    def matches(self, profile: Sequence[int]) -> bool:
        p = list(profile)
        if self.kind == "bounded":
            return bool(p) and max(p) <= self.bound and p[-1] == self.bound
        if self.kind == "full_diagonal_growth":
            return all(p[i] == i + 1 for i in range(len(p)))
        if self.kind == "strictly_increasing":
            return all(p[i] < p[i + 1] for i in range(len(p) - 1))
        if self.kind == "custom":
            return tuple(p) == self.profile
        raise MatrixError(f"unknown verdict kind {self.kind}")

    def describe(self) -> str:
        if self.kind == "bounded":
            return f"Bounded({self.bound})"
        if self.kind == "full_diagonal_growth":
            return "FullDiagonalGrowth"
        if self.kind == "strictly_increasing":
            return "StrictlyIncreasing"
        return f"Custom{list(self.profile or ())}"


@dataclass
class RankProfile:
    ranks: Tuple[int, ...]     # ranks of leading N x N submatrices, N = 1..N_max

    def __post_init__(self):
        rs = self.ranks
        if any(rs[i] > rs[i + 1] for i in range(len(rs) - 1)):
            raise MatrixError("rank profile must be monotone nondecreasing")
        if any(rs[i] > i + 1 for i in range(len(rs))):
            raise MatrixError("rank of an N x N matrix cannot exceed N")


def rank_profile(m: Matrix) -> RankProfile:
    n_max = min(m.rows, m.cols)
    return RankProfile(tuple(rank(m.leading(n)) for n in range(1, n_max + 1)))


def build_connection_matrix(
    op: Callable,
    invariant: Callable,
    rows: Sequence,
    cols: Sequence,
    row_labels: Optional[Sequence[str]] = None,
    col_labels: Optional[Sequence[str]] = None,
    glue_cache: Optional[Dict] = None,
) -> Matrix:
    """Entry (i, j) = invariant(op(rows[i], cols[j])).

    Booleans become 0/1.  Glued structures are cached by (i, j) so several
    invariants over the same family pair reuse them.
    """
    glue_cache = glue_cache if glue_cache is not None else {}
    entries: List[List[Entry]] = []
    for i, a in enumerate(rows):
        row: List[Entry] = []
        for j, b in enumerate(cols):
            key = (i, j)
            if key not in glue_cache:
                glue_cache[key] = op(a, b)
            try:
                v = invariant(glue_cache[key])
            except Exception as exc:
                raise MatrixError(f"invariant failed at entry ({i},{j}): {exc}") from exc
            if isinstance(v, bool):
                v = 1 if v else 0
            row.append(v)
        entries.append(row)
    return Matrix(len(rows), len(cols), entries,
                  tuple(row_labels or [str(i) for i in range(len(rows))]),
                  tuple(col_labels or [str(j) for j in range(len(cols))]))
