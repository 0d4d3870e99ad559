"""Exact linear algebra over the tower fields and over the rationals.

Two layers live here.  ``SeriesMatrix`` wraps rectangular arrays of tower
elements and supports the eliminations the rest of the library needs; pivots
are chosen by minimal valuation so division destroys as little window width
as possible, and a pivot candidate that is zero up to precision but not
exactly zero raises :class:`UndeterminedPivot` instead of guessing.

``WindowMatrix`` is the finite rational matrix of a linear operator
restricted to monomial bases of explicit exponent windows, the raw material
of every index computation.  Row/column labels are pairs
``(component, exponent)`` sorted component-major then exponent ascending;
determinants are reported relative to that order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from .errors import (
    LevelMismatch,
    UndeterminedPivot,
    WindowOverflow,
)
from .series import TowerElement, TowerField


class SeriesMatrix:
    """A rectangular matrix of tower elements at a common level."""

    __slots__ = ("level", "rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence[TowerElement]]):
        rows = tuple(tuple(r) for r in entries)
        if not rows or not rows[0]:
            raise ValueError("matrix needs at least one entry")
        width = len(rows[0])
        level = rows[0][0].level
        for r in rows:
            if len(r) != width:
                raise ValueError("ragged matrix")
            for x in r:
                if not isinstance(x, TowerElement) or x.level != level:
                    raise LevelMismatch("all entries must share one tower level")
        self.entries = rows
        self.rows = len(rows)
        self.cols = width
        self.level = level

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zeros(cls, field: TowerField, rows: int, cols: int) -> "SeriesMatrix":
        z = field.zero()
        return cls([[z] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, field: TowerField, n: int) -> "SeriesMatrix":
        one, zero = field.one(), field.zero()
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def from_rows(cls, rows) -> "SeriesMatrix":
        return cls(rows)

    # -- structure ------------------------------------------------------------

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i):
        return self.entries[i]

    def column(self, j):
        return tuple(r[j] for r in self.entries)

    def transpose(self) -> "SeriesMatrix":
        return SeriesMatrix(
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)]
        )

    def map(self, fn) -> "SeriesMatrix":
        return SeriesMatrix([[fn(x) for x in r] for r in self.entries])

    def derive(self, i: int) -> "SeriesMatrix":
        return self.map(lambda x: x.derive(i))

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, SeriesMatrix):
            return NotImplemented
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return SeriesMatrix(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ]
        )

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self.map(lambda x: -x)

    def __matmul__(self, other):
        if not isinstance(other, SeriesMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = None
                for k in range(self.cols):
                    a = self.entries[i][k]
                    b = other.entries[k][j]
                    if a.is_exactly_zero() or b.is_exactly_zero():
                        continue
                    term = a * b
                    acc = term if acc is None else acc + term
                row.append(acc if acc is not None else TowerElement.zero(self.level))
            out.append(row)
        return SeriesMatrix(out)

    def scale(self, f) -> "SeriesMatrix":
        return self.map(lambda x: x * f)

    def apply(self, vec: Sequence[TowerElement]) -> Tuple[TowerElement, ...]:
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        out = []
        for i in range(self.rows):
            acc = None
            for k in range(self.cols):
                a = self.entries[i][k]
                if a.is_exactly_zero() or vec[k].is_exactly_zero():
                    continue
                term = a * vec[k]
                acc = term if acc is None else acc + term
            out.append(acc if acc is not None else TowerElement.zero(self.level))
        return tuple(out)

    def agrees_with(self, other: "SeriesMatrix") -> bool:
        if (self.rows, self.cols) != (other.rows, other.cols):
            return False
        return all(
            a.agrees_with(b)
            for ra, rb in zip(self.entries, other.entries)
            for a, b in zip(ra, rb)
        )

    def is_zero_up_to_precision(self) -> bool:
        return not any(x.is_certainly_nonzero() for r in self.entries for x in r)

    def block_diag(self, other: "SeriesMatrix") -> "SeriesMatrix":
        z1 = TowerElement.zero(self.level)
        top = [list(r) + [z1] * other.cols for r in self.entries]
        bottom = [[z1] * self.cols + list(r) for r in other.entries]
        return SeriesMatrix(top + bottom)

    def kron(self, other: "SeriesMatrix") -> "SeriesMatrix":
        out = []
        for i in range(self.rows):
            for k in range(other.rows):
                row = []
                for j in range(self.cols):
                    a = self.entries[i][j]
                    for l in range(other.cols):
                        row.append(a * other.entries[k][l])
                out.append(row)
        return SeriesMatrix(out)

    def __eq__(self, other):
        return isinstance(other, SeriesMatrix) and self.entries == other.entries

    def __repr__(self):
        return f"SeriesMatrix({self.rows}x{self.cols}, level {self.level})"


@dataclass
class EliminationResult:
    rank: int
    pivots: Tuple[Tuple[int, int], ...]  # (row, col) in the reduced matrix
    kernel: Tuple[Tuple[TowerElement, ...], ...]
    determinant: Optional[TowerElement]  # None for non-square input


def _classify(x: TowerElement):
    return x.classify_leading()


def rank_kernel_det(M: SeriesMatrix, want_kernel: bool = True) -> EliminationResult:
    """Row-reduce over the field with minimal-valuation pivoting.

    Raises :class:`UndeterminedPivot` when a column has no certified-nonzero
    candidate but carries entries that are only zero up to precision.
    """
    level = M.level
    work: List[List[TowerElement]] = [list(r) for r in M.entries]
    n, m = M.rows, M.cols
    sign = 1
    pivots: List[Tuple[int, int]] = []
    pivot_elements: List[TowerElement] = []
    r = 0
    for c in range(m):
        best = None
        undetermined = False
        for i in range(r, n):
            cls, v = _classify(work[i][c])
            if cls == "nonzero":
                if best is None or v < best[0]:
                    best = (v, i)
            elif cls == "undetermined":
                undetermined = True
        if best is None:
            if undetermined:
                raise UndeterminedPivot(c)
            continue
        _, i = best
        if i != r:
            work[i], work[r] = work[r], work[i]
            sign = -sign
        piv = work[r][c]
        piv_inv = piv.invert()
        for i2 in range(r + 1, n):
            x = work[i2][c]
            if x.is_exactly_zero():
                continue
            factor = x * piv_inv
            for j in range(c, m):
                work[i2][j] = work[i2][j] - factor * work[r][j]
            work[i2][c] = TowerElement.zero(level)
        pivots.append((r, c))
        pivot_elements.append(piv)
        r += 1
        if r == n:
            # classify the remaining columns for kernel extraction only
            break
    rank = r
    determinant: Optional[TowerElement] = None
    if n == m:
        if rank == n:
            det = pivot_elements[0]
            for p in pivot_elements[1:]:
                det = det * p
            determinant = det if sign == 1 else -det
        else:
            determinant = TowerElement.zero(level)
    kernel: Tuple[Tuple[TowerElement, ...], ...] = ()
    if want_kernel:
        # back-substitute to reduced form: normalize pivots, clear above
        for idx in range(rank - 1, -1, -1):
            pr, pc = pivots[idx]
            inv = work[pr][pc].invert()
            work[pr] = [x * inv for x in work[pr]]
            work[pr][pc] = TowerElement.constant(level, 1)
            for i2 in range(pr):
                x = work[i2][pc]
                if x.is_exactly_zero():
                    continue
                work[i2] = [
                    a - x * b for a, b in zip(work[i2], work[pr])
                ]
                work[i2][pc] = TowerElement.zero(level)
        pivot_cols = {pc: pr for pr, pc in pivots}
        free_cols = [c for c in range(m) if c not in pivot_cols]
        vecs = []
        for f in free_cols:
            vec = [TowerElement.zero(level)] * m
            vec[f] = TowerElement.constant(level, 1)
            for pc, pr in pivot_cols.items():
                vec[pc] = -work[pr][f]
            vecs.append(tuple(vec))
        kernel = tuple(vecs)
    return EliminationResult(rank, tuple(pivots), kernel, determinant)


def solve(M: SeriesMatrix, rhs: Sequence[TowerElement]) -> Tuple[TowerElement, ...]:
    """Solve M x = rhs for square M with certified full rank."""
    if M.rows != M.cols:
        raise ValueError("solve needs a square matrix")
    n = M.rows
    level = M.level
    work = [list(r) + [rhs[i]] for i, r in enumerate(M.entries)]
    for c in range(n):
        best = None
        undetermined = False
        for i in range(c, n):
            cls, v = _classify(work[i][c])
            if cls == "nonzero":
                if best is None or v < best[0]:
                    best = (v, i)
            elif cls == "undetermined":
                undetermined = True
        if best is None:
            if undetermined:
                raise UndeterminedPivot(c)
            raise UndeterminedPivot(c, f"matrix is singular at column {c}")
        _, i = best
        if i != c:
            work[i], work[c] = work[c], work[i]
        inv = work[c][c].invert()
        work[c] = [x * inv for x in work[c]]
        for i2 in range(n):
            if i2 == c:
                continue
            x = work[i2][c]
            if x.is_exactly_zero():
                continue
            work[i2] = [a - x * b for a, b in zip(work[i2], work[c])]
            work[i2][c] = TowerElement.zero(level)
    return tuple(work[i][n] for i in range(n))


def inverse(M: SeriesMatrix) -> SeriesMatrix:
    """Matrix inverse over the tower field."""
    if M.rows != M.cols:
        raise ValueError("inverse needs a square matrix")
    n = M.rows
    level = M.level
    field_one = TowerElement.constant(level, 1)
    zero = TowerElement.zero(level)
    work = [
        list(r) + [field_one if i == j else zero for j in range(n)]
        for i, r in enumerate(M.entries)
    ]
    for c in range(n):
        best = None
        undetermined = False
        for i in range(c, n):
            cls, v = _classify(work[i][c])
            if cls == "nonzero":
                if best is None or v < best[0]:
                    best = (v, i)
            elif cls == "undetermined":
                undetermined = True
        if best is None:
            if undetermined:
                raise UndeterminedPivot(c)
            raise UndeterminedPivot(c, f"matrix is singular at column {c}")
        _, i = best
        if i != c:
            work[i], work[c] = work[c], work[i]
        inv = work[c][c].invert()
        work[c] = [x * inv for x in work[c]]
        for i2 in range(n):
            if i2 == c:
                continue
            x = work[i2][c]
            if x.is_exactly_zero():
                continue
            work[i2] = [a - x * b for a, b in zip(work[i2], work[c])]
            work[i2][c] = zero
    return SeriesMatrix([row[n:] for row in work])


# ---------------------------------------------------------------------------
# Rational (window) matrices
# ---------------------------------------------------------------------------

def rref_q(rows: List[List[Fraction]]) -> Tuple[int, List[int], List[List[Fraction]]]:
    """Reduced row echelon form over Q; returns (rank, pivot columns, rref)."""
    work = [list(r) for r in rows]
    n = len(work)
    m = len(work[0]) if n else 0
    piv_cols: List[int] = []
    r = 0
    for c in range(m):
        pivot_row = None
        for i in range(r, n):
            if work[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        work[pivot_row], work[r] = work[r], work[pivot_row]
        inv = Fraction(1) / work[r][c]
        work[r] = [x * inv for x in work[r]]
        for i in range(n):
            if i != r and work[i][c] != 0:
                f = work[i][c]
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        piv_cols.append(c)
        r += 1
        if r == n:
            # continue classifying columns to find all pivots
            pass
    return r, piv_cols, work


def kernel_q(rows: List[List[Fraction]]) -> List[List[Fraction]]:
    """Basis of the right kernel over Q."""
    if not rows:
        return []
    m = len(rows[0])
    rank, piv_cols, red = rref_q(rows)
    piv_set = dict(zip(piv_cols, range(rank)))
    free = [c for c in range(m) if c not in piv_set]
    out = []
    for f in free:
        vec = [Fraction(0)] * m
        vec[f] = Fraction(1)
        for pc, pr in piv_set.items():
            vec[pc] = -red[pr][f]
        out.append(vec)
    return out


def rank_q(rows: List[List[Fraction]]) -> int:
    if not rows:
        return 0
    rank, _, _ = rref_q(rows)
    return rank


# -- sparse variants (dict rows keyed by column index) -------------------------

def sparse_echelon(rows) -> dict:
    """Echelon pivots of a sparse rational matrix; returns {col: row dict}.

    Rows are dicts mapping column indices to nonzero fractions; pivot rows
    are normalized to a unit leading entry.  Banded inputs stay banded, so
    this is much faster than dense elimination on window matrices.
    """
    pivots: dict = {}
    for raw in rows:
        r = {c: v for c, v in raw.items() if v != 0}
        while r:
            c = min(r)
            if c in pivots:
                f = r.pop(c)
                for cc, v in pivots[c].items():
                    if cc == c:
                        continue
                    nv = r.get(cc, Fraction(0)) - f * v
                    if nv:
                        r[cc] = nv
                    else:
                        r.pop(cc, None)
            else:
                inv = Fraction(1) / r[c]
                pivots[c] = {cc: v * inv for cc, v in r.items()}
                break
    return pivots


def sparse_rank(rows) -> int:
    return len(sparse_echelon(rows))


def sparse_kernel(rows, ncols: int) -> List[dict]:
    """Right-kernel basis of a sparse matrix, as sparse column vectors."""
    pivots = sparse_echelon(rows)
    # back-substitute to reduced form
    for c in sorted(pivots, reverse=True):
        prow = pivots[c]
        for c2, r2 in pivots.items():
            if c2 == c or c not in r2:
                continue
            f = r2.pop(c)
            for cc, v in prow.items():
                if cc == c:
                    continue
                nv = r2.get(cc, Fraction(0)) - f * v
                if nv:
                    r2[cc] = nv
                else:
                    r2.pop(cc, None)
    out = []
    for f in range(ncols):
        if f in pivots:
            continue
        vec = {f: Fraction(1)}
        for pc, prow in pivots.items():
            v = prow.get(f)
            if v:
                vec[pc] = -v
        out.append(vec)
    return out


@dataclass(frozen=True)
class WindowMatrix:
    """Finite rational matrix of an operator on labelled monomial windows.

    Labels are ``(component, exponents)`` with exponents a tuple listed
    outermost first; the basis order is component-major, exponents ascending
    lexicographically.  Determinants refer to this order.
    """

    row_labels: Tuple
    col_labels: Tuple
    entries: Tuple[Tuple[Fraction, ...], ...]

    @property
    def shape(self):
        return (len(self.row_labels), len(self.col_labels))

    def dense(self) -> List[List[Fraction]]:
        return [list(r) for r in self.entries]

    def rank(self) -> int:
        return rank_q(self.dense())

    def kernel(self) -> List[List[Fraction]]:
        return kernel_q(self.dense())

    def kernel_dim(self) -> int:
        return len(self.col_labels) - self.rank()

    def cokernel_dim(self) -> int:
        return len(self.row_labels) - self.rank()

    def determinant(self) -> Fraction:
        n, m = self.shape
        if n != m:
            raise ValueError("determinant needs a square window")
        work = self.dense()
        det = Fraction(1)
        for c in range(n):
            pivot_row = None
            for i in range(c, n):
                if work[i][c] != 0:
                    pivot_row = i
                    break
            if pivot_row is None:
                return Fraction(0)
            if pivot_row != c:
                work[pivot_row], work[c] = work[c], work[pivot_row]
                det = -det
            det *= work[c][c]
            inv = Fraction(1) / work[c][c]
            for i in range(c + 1, n):
                if work[i][c] != 0:
                    f = work[i][c] * inv
                    for j in range(c, n):
                        work[i][j] -= f * work[c][j]
        return det

    def pseudo_determinant(self) -> Fraction:
        """Product of nonzero pivots in basis order (skips defective columns)."""
        work = self.dense()
        n = len(work)
        m = len(work[0]) if n else 0
        det = Fraction(1)
        r = 0
        for c in range(m):
            pivot_row = None
            for i in range(r, n):
                if work[i][c] != 0:
                    pivot_row = i
                    break
            if pivot_row is None:
                continue
            if pivot_row != r:
                work[pivot_row], work[r] = work[r], work[pivot_row]
                det = -det
            det *= work[r][c]
            inv = Fraction(1) / work[r][c]
            for i in range(r + 1, n):
                if work[i][c] != 0:
                    f = work[i][c] * inv
                    for j in range(c, m):
                        work[i][j] -= f * work[r][j]
            r += 1
        return det


def sorted_labels(labels) -> Tuple:
    return tuple(sorted(labels, key=lambda lab: (lab[0], lab[1])))


def window_matrix(
    apply_to_monomial: Callable[[int, Tuple[int, ...]], Sequence[TowerElement]],
    src_labels,
    tgt_labels=None,
    *,
    strict: bool = True,
) -> WindowMatrix:
    """Build the rational matrix of a linear operator on monomial windows.

    ``apply_to_monomial(component, exponents)`` must return the image as a
    vector of tower elements (one per output component).  When ``tgt_labels``
    is None the exact support of all images is used; otherwise image
    coefficients outside the target window are truncated away (quotient
    semantics).  A coefficient that is *unknown* rather than merely outside
    the window raises :class:`WindowOverflow` when ``strict``.
    """
    src = sorted_labels(src_labels)
    images = []
    for comp, exps in src:
        images.append(tuple(apply_to_monomial(comp, exps)))
    if tgt_labels is None:
        seen = set()
        for img in images:
            for out_comp, el in enumerate(img):
                seen.update(
                    (out_comp, _label_exps(el, e)) for e in _support_exponents(el)
                )
                if not el.is_exactly_zero() and not el.is_fully_exact() and strict:
                    raise WindowOverflow(
                        "image support is not exactly known; pass explicit target labels"
                    )
        tgt = sorted_labels(seen)
    else:
        tgt = sorted_labels(tgt_labels)
    index = {lab: i for i, lab in enumerate(tgt)}
    cols = []
    for img in images:
        col = [Fraction(0)] * len(tgt)
        for out_comp, el in enumerate(img):
            for exps, q in _iter_rational_coefficients(el):
                lab = (out_comp, exps)
                if lab in index:
                    col[index[lab]] = q
        if strict:
            for lab in tgt:
                out_comp, exps = lab
                if not _knows_exponents(img[out_comp], exps):
                    raise WindowOverflow(
                        f"image coefficient at {lab} is below the guaranteed precision"
                    )
        cols.append(col)
    entries = tuple(
        tuple(cols[j][i] for j in range(len(src))) for i in range(len(tgt))
    )
    return WindowMatrix(tgt, src, entries)


def _support_exponents(el: TowerElement):
    if el.level == 1:
        return [(e,) for e in sorted(el.coeffs)]
    out = []
    for e in sorted(el.coeffs):
        inner = el.coeffs[e]
        for rest in _support_exponents(inner):
            out.append((e,) + rest)
    return out


def _label_exps(el: TowerElement, exps):
    return exps


def _iter_rational_coefficients(el: TowerElement):
    """Yield ((outer, ..., inner) exponent tuples, Fraction) over the support."""
    if el.level == 1:
        for e in sorted(el.coeffs):
            yield (e,), el.coeffs[e]
        return
    for e in sorted(el.coeffs):
        for rest, q in _iter_rational_coefficients(el.coeffs[e]):
            yield (e,) + rest, q


def _knows_exponents(el: TowerElement, exps) -> bool:
    e = exps[0]
    if not el.knows(e):
        return False
    if el.level == 1:
        return True
    if e in el.coeffs:
        return _knows_exponents(el.coeffs[e], exps[1:])
    return True  # exactly-zero coefficient is fully known
