"""Finite-window model of Tate-type operator indices.

An operator on the one-variable field is realized on monomial windows: the
source window is symmetric, the target window extends at the bottom to the
full displacement hull of the operator (no image coefficient is dropped
there) and is cut at the top at the displacement of the derivative term
(quotient semantics, so deep lattice directions are truncated uniformly).
Kernel and cokernel dimensions of the resulting rational matrices are
tracked over a window schedule and declared stable after two consecutive
agreements; truncation alone cannot prove stabilization, so reports carry
the Newton-polygon prediction whenever one is available, and kernel
elements are only reported when their windowed representatives extend under
window enlargement.

The same construction runs one level up: an operator in the outermost
variable of a two-variable field is realized as a finite matrix *over* the
inner field, and its kernel/cokernel are then finite-dimensional inner-field
spaces with explicit bounded outer windows.  That is the computational
meaning used for the directional kernel/cokernel boundedness judgments.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .connection import Connection
from .errors import (
    InsufficientPrecision,
    UndeterminedPivot,
    UnsupportedFrame,
    Unstabilized,
)
from .linalg import (
    SeriesMatrix,
    kernel_q,
    rank_kernel_det,
    rref_q,
    sparse_kernel,
    sparse_rank,
)
from .series import TowerElement, TowerField

DEFAULT_SCHEDULE = (8, 12, 16, 24, 32)
OUTER_SCHEDULE = (4, 6, 8, 12)


@dataclass(frozen=True)
class Lattice:
    """A shifted standard lattice t1^(a1) ... tn^(an) * (integral model)^r."""

    level: int
    shifts: Tuple[int, ...]
    rank: int


@dataclass
class IndexReport:
    ker_dim: int
    coker_dim: int
    index: int
    stabilized_at: Optional[int]
    ker_basis: Tuple[Tuple[TowerElement, ...], ...] = ()
    newton_prediction: Optional[int] = None
    trace: Tuple[Tuple[int, int, int], ...] = ()  # (window, ker, coker)

    @property
    def stabilized(self) -> bool:
        return self.stabilized_at is not None

    def agrees_with_newton(self) -> Optional[bool]:
        if self.newton_prediction is None:
            return None
        return self.index == self.newton_prediction


def require_stabilized(report: IndexReport) -> IndexReport:
    if not report.stabilized:
        raise Unstabilized(report)
    return report


def _falling(e: int, d: int) -> Fraction:
    out = Fraction(1)
    for k in range(d):
        out *= e - k
    return out


class MatrixDiffOp:
    """sum_d C_d (d/dt)^d with square matrix coefficients over k((t))."""

    __slots__ = ("rank", "coeffs")

    def __init__(self, rank: int, coeffs: Dict[int, SeriesMatrix]):
        self.rank = rank
        self.coeffs = dict(coeffs)
        for M in coeffs.values():
            if M.rows != rank or M.cols != rank:
                raise ValueError("coefficient matrices must be rank x rank")

    @classmethod
    def from_connection(
        cls, C: Connection, normalizer: Optional[TowerElement] = None, prec: Optional[int] = None
    ) -> "MatrixDiffOp":
        """The operator h^(-1) (d/dt + A) for the 1-form normalizer h dt."""
        if C.field.level != 1:
            raise ValueError("one-variable connections only")
        field = C.field
        r = C.rank
        I = SeriesMatrix.identity(field, r)
        if normalizer is None:
            hinv = field.one()
        else:
            hinv = normalizer.invert(prec)
        return cls(r, {1: I.scale(hinv), 0: C.matrices[0].scale(hinv)})

    @classmethod
    def from_scalar(cls, coeffs: Sequence[TowerElement]) -> "MatrixDiffOp":
        return cls(1, {d: SeriesMatrix([[a]]) for d, a in enumerate(coeffs)})

    @classmethod
    def multiplication(cls, M: SeriesMatrix) -> "MatrixDiffOp":
        return cls(M.rows, {0: M})

    @classmethod
    def zero(cls, field: TowerField, rank: int) -> "MatrixDiffOp":
        return cls(rank, {0: SeriesMatrix.zeros(field, rank, rank)})

    def apply(self, vec: Sequence[TowerElement]) -> Tuple[TowerElement, ...]:
        level = vec[0].level
        out = [TowerElement.zero(level) for _ in range(self.rank)]
        current = list(vec)
        for d in range(0, max(self.coeffs) + 1):
            if d > 0:
                current = [v.derive(1) for v in current]
            M = self.coeffs.get(d)
            if M is None:
                continue
            img = M.apply(current)
            out = [a + b for a, b in zip(out, img)]
        return tuple(out)

    def apply_to_monomial(self, comp: int, e: int) -> Tuple[TowerElement, ...]:
        level = next(iter(self.coeffs.values())).level
        out = [TowerElement.zero(level) for _ in range(self.rank)]
        for d, M in self.coeffs.items():
            f = _falling(e, d)
            if f == 0:
                continue
            mono = TowerElement.monomial(level, [e - d], f)
            for i in range(self.rank):
                entry = M[i, comp]
                if entry.is_exactly_zero():
                    continue
                out[i] = out[i] + entry * mono
        return tuple(out)

    # -- displacement hulls ----------------------------------------------------

    def _row_entries(self, i: int):
        for d, M in self.coeffs.items():
            for j in range(self.rank):
                x = M[i, j]
                if not x.is_exactly_zero():
                    yield d, x

    def delta_bottom(self, i: int) -> int:
        vals = []
        for d, x in self._row_entries(i):
            v = x.valuation_lower_bound()
            if v is not None:
                vals.append(v - d)
        return min(vals) if vals else 0

    def delta_top(self, i: int) -> int:
        vals = []
        for d, x in self._row_entries(i):
            if d < 1:
                continue
            v = x.valuation_lower_bound()
            if v is not None:
                vals.append(v - d)
        if vals:
            return min(vals)
        return self.delta_bottom(i)

    def is_zero_row(self, i: int) -> bool:
        return next(self._row_entries(i), None) is None


# ---------------------------------------------------------------------------
# Window realization and stabilized index
# ---------------------------------------------------------------------------

@dataclass
class WindowRealization:
    src_labels: Tuple
    tgt_labels: Tuple
    columns: List[dict]  # sparse columns: {target row index: value}

    def sparse_rows(self) -> List[dict]:
        rows: List[dict] = [dict() for _ in self.tgt_labels]
        for j, col in enumerate(self.columns):
            for i, q in col.items():
                rows[i][j] = q
        return rows

    def rows(self) -> List[List[Fraction]]:
        n = len(self.tgt_labels)
        out = [[Fraction(0)] * len(self.columns) for _ in range(n)]
        for j, col in enumerate(self.columns):
            for i, q in col.items():
                out[i][j] = q
        return out


def realize_window(op: MatrixDiffOp, w: int, mode: str = "top") -> WindowRealization:
    """Matrix of ``op`` on [-w, w) monomial windows.

    Both modes extend the target down to the full displacement hull, so no
    image coefficient is lost at the bottom.  The ``top`` mode cuts the
    target at the derivative term's displacement; the gap between the two
    displacements is what the cokernel count measures.  The ``bottom`` mode
    cuts at the hull displacement itself, the sharp image of a deep lattice,
    which guarantees that truncations of true solutions lie in the windowed
    kernel.  Kernels are read off the bottom realization, cokernels off the
    top one.
    """
    src_labels = [(c, e) for c in range(op.rank) for e in range(-w, w)]
    bounds = []
    for i in range(op.rank):
        if op.is_zero_row(i):
            bounds.append((-w, w))
        elif mode == "bottom":
            d = op.delta_bottom(i)
            bounds.append((-w + d, w + d))
        else:
            bounds.append((-w + op.delta_bottom(i), w + op.delta_top(i)))
    tgt_labels = [
        (c, e) for c in range(op.rank) for e in range(bounds[c][0], bounds[c][1])
    ]
    index = {lab: k for k, lab in enumerate(tgt_labels)}
    columns = []
    for comp, e in src_labels:
        img = op.apply_to_monomial(comp, e)
        col: dict = {}
        for i, el in enumerate(img):
            lo_i, hi_i = bounds[i]
            if not (el.exact or el.hi >= hi_i):
                raise InsufficientPrecision(
                    "operator coefficients are too short for this window"
                )
            for ee, q in el.coeffs.items():
                if ee >= hi_i:
                    continue  # quotient truncation at the top
                if ee < lo_i:
                    raise AssertionError("image fell below the certified hull")
                col[index[(i, ee)]] = q
        columns.append(col)
    return WindowRealization(tuple(src_labels), tuple(tgt_labels), columns)


def _kernel_vectors_to_elements(
    labels, vecs: List[List[Fraction]], rank: int, w: int
) -> Tuple[Tuple[TowerElement, ...], ...]:
    out = []
    for v in vecs:
        comps = []
        for c in range(rank):
            coeffs = {}
            for k, (comp, e) in enumerate(labels):
                if comp == c and v[k] != 0:
                    coeffs[e] = v[k]
            comps.append(TowerElement(1, coeffs, w, False))
        out.append(tuple(comps))
    return tuple(out)


def _truncate_vectors(big_vecs, big_labels, small_labels):
    pos = {lab: i for i, lab in enumerate(small_labels)}
    out = []
    for v in big_vecs:
        row = [Fraction(0)] * len(small_labels)
        for k, lab in enumerate(big_labels):
            if lab in pos:
                row[pos[lab]] = v[k]
        out.append(row)
    return out


def _span_intersection(a_vecs, b_vecs):
    """Basis of span(a) intersect span(b), coordinates of the common space."""
    if not a_vecs or not b_vecs:
        return []
    m = len(a_vecs[0])
    # solve sum x_i a_i = sum y_i b_i: one equation per coordinate
    rows = []
    na, nb = len(a_vecs), len(b_vecs)
    for j in range(m):
        rows.append(
            [a_vecs[i][j] for i in range(na)] + [-b_vecs[i][j] for i in range(nb)]
        )
    combos = kernel_q(rows)
    out = []
    for combo in combos:
        vec = [Fraction(0)] * m
        for i in range(na):
            if combo[i] != 0:
                for j in range(m):
                    vec[j] += combo[i] * a_vecs[i][j]
        if any(x != 0 for x in vec):
            out.append(vec)
    # reduce to an independent set
    if not out:
        return []
    rank, piv, red = rref_q(out)
    return [row for row in red[:rank]]


def operator_index(
    op: MatrixDiffOp,
    schedule: Sequence[int] = DEFAULT_SCHEDULE,
    newton_prediction: Optional[int] = None,
    want_kernel: bool = True,
) -> IndexReport:
    """Stabilized window kernel/cokernel dimensions of a one-variable operator."""
    # per window: bottom-realization kernel and top-realization cokernel;
    # the reported kernel dimension is the persistent one, the part of the
    # windowed kernel that extends under the next window enlargement
    kernels: List[Tuple[int, Tuple, List[List[Fraction]]]] = []
    cokers: List[int] = []
    trace: List[Tuple[int, int, int]] = []
    for w in schedule:
        try:
            bottom = realize_window(op, w, "bottom")
            top = realize_window(op, w, "top")
        except InsufficientPrecision:
            # coefficients cannot honestly fill this window; larger windows
            # are unreachable, work with what was seen so far
            break
        sparse = sparse_kernel(bottom.sparse_rows(), len(bottom.src_labels))
        dense = [
            [vec.get(k, Fraction(0)) for k in range(len(bottom.src_labels))]
            for vec in sparse
        ]
        kernels.append((w, bottom.src_labels, dense))
        cokers.append(len(top.tgt_labels) - sparse_rank(top.sparse_rows()))
        if len(kernels) < 2:
            continue
        i = len(kernels) - 2
        wi, labels, kvecs = kernels[i]
        _, labels2, kvecs2 = kernels[i + 1]
        if not kvecs:
            persistent_vecs: List[List[Fraction]] = []
        else:
            truncated = _truncate_vectors(kvecs2, labels2, labels)
            persistent_vecs = _span_intersection(truncated, kvecs)
        trace.append((wi, len(persistent_vecs), cokers[i]))
        if len(trace) >= 2 and trace[-1][1:] == trace[-2][1:]:
            ker, coker = trace[-1][1], trace[-1][2]
            basis = ()
            if want_kernel and ker > 0:
                basis = _kernel_vectors_to_elements(
                    labels, persistent_vecs, op.rank, wi
                )
            return IndexReport(
                ker,
                coker,
                ker - coker,
                wi,
                basis,
                newton_prediction,
                tuple(trace),
            )
        last_persistent = persistent_vecs
    if not kernels:
        raise InsufficientPrecision(
            "operator coefficients cannot fill even the smallest window"
        )
    if not trace:
        # a single window was computable; report it without persistence
        w, labels, kvecs = kernels[0]
        return IndexReport(
            len(kvecs),
            cokers[0],
            len(kvecs) - cokers[0],
            None,
            (),
            newton_prediction,
            ((w, len(kvecs), cokers[0]),),
        )
    w, ker, coker = trace[-1]
    return IndexReport(
        ker, coker, ker - coker, None, (), newton_prediction, tuple(trace)
    )


def calkin_iso_check(
    op: MatrixDiffOp, schedule: Sequence[int] = DEFAULT_SCHEDULE
) -> Tuple[bool, IndexReport]:
    """True when both window dimensions stabilize finite."""
    report = operator_index(op, schedule, want_kernel=False)
    return report.stabilized, report


# ---------------------------------------------------------------------------
# Outer-variable windows over a two-variable field
# ---------------------------------------------------------------------------

class OuterMatrixDiffOp:
    """sum_d C_d (d/d t_outer)^d over the two-variable field.

    Coefficients are square matrices of level-2 elements; the operator is
    linear over the inner field, so its window matrices have inner-field
    entries.
    """

    __slots__ = ("rank", "coeffs", "level")

    def __init__(self, rank: int, coeffs: Dict[int, SeriesMatrix]):
        self.rank = rank
        self.coeffs = dict(coeffs)
        self.level = next(iter(coeffs.values())).level
        if self.level != 2:
            raise UnsupportedFrame("outer windows are implemented for two variables")

    @classmethod
    def from_connection(
        cls, C: Connection, normalizer: Optional[TowerElement] = None, prec: Optional[int] = None
    ) -> "OuterMatrixDiffOp":
        field = C.field
        n = field.level
        I = SeriesMatrix.identity(field, C.rank)
        if normalizer is None:
            hinv = field.one()
        else:
            hinv = normalizer.invert(prec)
        return cls(C.rank, {1: I.scale(hinv), 0: C.matrices[n - 1].scale(hinv)})

    def _row_entries(self, i: int):
        for d, M in self.coeffs.items():
            for j in range(self.rank):
                x = M[i, j]
                if not x.is_exactly_zero():
                    yield d, x

    def is_zero_row(self, i: int) -> bool:
        return next(self._row_entries(i), None) is None

    def delta_bottom(self, i: int) -> int:
        vals = []
        for d, x in self._row_entries(i):
            v = x.valuation_lower_bound()
            if v is not None:
                vals.append(v - d)
        return min(vals) if vals else 0

    def delta_top(self, i: int) -> int:
        vals = []
        for d, x in self._row_entries(i):
            if d < 1:
                continue
            v = x.valuation_lower_bound()
            if v is not None:
                vals.append(v - d)
        if vals:
            return min(vals)
        return self.delta_bottom(i)


@dataclass
class OuterRealization:
    src_labels: Tuple  # (component, outer exponent)
    tgt_labels: Tuple
    matrix: SeriesMatrix  # entries over the inner field (level 1)


def realize_outer_window(
    op: OuterMatrixDiffOp, w: int, mode: str = "top"
) -> OuterRealization:
    src_labels = [(c, e) for c in range(op.rank) for e in range(-w, w)]
    bounds = []
    for i in range(op.rank):
        if op.is_zero_row(i):
            bounds.append((-w, w))
        elif mode == "bottom":
            d = op.delta_bottom(i)
            bounds.append((-w + d, w + d))
        else:
            bounds.append((-w + op.delta_bottom(i), w + op.delta_top(i)))
    tgt_labels = [
        (c, e) for c in range(op.rank) for e in range(bounds[c][0], bounds[c][1])
    ]
    index = {lab: k for k, lab in enumerate(tgt_labels)}
    zero1 = TowerElement.zero(1)
    entries = [
        [zero1 for _ in range(len(src_labels))] for _ in range(len(tgt_labels))
    ]
    for col_idx, (comp, e) in enumerate(src_labels):
        for d, M in op.coeffs.items():
            f = _falling(e, d)
            if f == 0:
                continue
            for i in range(op.rank):
                entry = M[i, comp]
                if entry.is_exactly_zero():
                    continue
                lo_i, hi_i = bounds[i]
                if not (entry.exact or entry.hi >= hi_i - (e - d)):
                    raise InsufficientPrecision(
                        "outer operator coefficients too short for this window"
                    )
                for m, inner in entry.coeffs.items():
                    ee = e - d + m
                    if ee >= hi_i:
                        continue
                    if ee < lo_i:
                        raise AssertionError("image fell below the certified hull")
                    k = index[(i, ee)]
                    entries[k][col_idx] = entries[k][col_idx] + inner * f
    return OuterRealization(tuple(src_labels), tuple(tgt_labels), SeriesMatrix(entries))


@dataclass
class OuterReduction:
    """Windowed kernel/cokernel of an outer-variable operator, over the inner field."""

    window: int
    src_labels: Tuple
    tgt_labels: Tuple
    matrix: SeriesMatrix
    kernel: Tuple  # tuples of inner-field elements indexed by src_labels
    coker_slots: Tuple  # tgt labels representing the cokernel
    rank: int

    @property
    def ker_dim(self) -> int:
        return len(self.kernel)

    @property
    def coker_dim(self) -> int:
        return len(self.coker_slots)


def reduce_outer_window(op: OuterMatrixDiffOp, w: int) -> OuterReduction:
    # kernel from the lattice-sharp bottom realization, cokernel from the
    # derivative-cut top realization (same split as operator_index)
    bottom = realize_outer_window(op, w, "bottom")
    res_b = rank_kernel_det(bottom.matrix, want_kernel=True)
    top = realize_outer_window(op, w, "top")
    res_t = rank_kernel_det(top.matrix.transpose(), want_kernel=False)
    covered = {c for _, c in res_t.pivots}
    coker_slots = tuple(
        lab for k, lab in enumerate(top.tgt_labels) if k not in covered
    )
    return OuterReduction(
        w,
        top.src_labels,
        top.tgt_labels,
        top.matrix,
        res_b.kernel,
        coker_slots,
        res_t.rank,
    )


@dataclass
class DirectionalProfile:
    direction: int
    ker_dim: int
    ker_window: Optional[Tuple[int, int]]
    coker_dim: int
    coker_window: Optional[Tuple[int, int]]
    stabilized_at: Optional[int]
    unconstrained: Tuple[int, ...]
    trace: Tuple[Tuple[int, int, int], ...]

    @property
    def stabilized(self) -> bool:
        return self.stabilized_at is not None

    @property
    def bounded(self) -> bool:
        return self.stabilized

    def bounding_lattice(self, rank: int = 1) -> Optional[Lattice]:
        """A shifted standard lattice containing the kernel representatives.

        The shift is only meaningful in the profiled direction; the other
        variables are unconstrained and keep shift zero.
        """
        if self.ker_window is None:
            return None
        shifts = [0, 0]
        shifts[self.direction - 1] = self.ker_window[0]
        return Lattice(2, tuple(shifts), rank)


def _kernel_window(labels, kernel) -> Optional[Tuple[int, int]]:
    exps = []
    for vec in kernel:
        for k, (comp, e) in enumerate(labels):
            x = vec[k]
            if isinstance(x, TowerElement) and x.is_certainly_nonzero():
                exps.append(e)
            elif isinstance(x, Fraction) and x != 0:
                exps.append(e)
    if not exps:
        return None
    return (min(exps), max(exps) + 1)


def _coker_window(slots) -> Optional[Tuple[int, int]]:
    if not slots:
        return None
    exps = [e for _, e in slots]
    return (min(exps), max(exps) + 1)


def directional_kernel_profile(
    C: Connection,
    vector_field: Sequence[TowerElement],
    schedule: Sequence[int] = OUTER_SCHEDULE,
) -> DirectionalProfile:
    """Bounded windowed kernel/cokernel of the directional derivative.

    The vector field must point along a single coordinate direction; the
    mixed case is not operationalized here.
    """
    n = C.field.level
    if n != 2:
        raise UnsupportedFrame("directional profiles are implemented for n = 2")
    nonzero = [
        i for i, a in enumerate(vector_field, start=1) if a.is_certainly_nonzero()
    ]
    if len(nonzero) != 1 or any(
        not a.is_exactly_zero() and i not in nonzero
        for i, a in enumerate(vector_field, start=1)
    ):
        raise UnsupportedFrame(
            "profiles need a vector field along a single coordinate direction"
        )
    i = nonzero[0]
    a = vector_field[i - 1]
    if i == 2:
        I = SeriesMatrix.identity(C.field, C.rank)
        op = OuterMatrixDiffOp(
            C.rank, {1: I.scale(a), 0: C.matrices[1].scale(a)}
        )
        trace = []
        prev = None
        for w in schedule:
            red = reduce_outer_window(op, w)
            dims = (red.ker_dim, red.coker_dim)
            trace.append((w, *dims))
            if prev is not None and prev[0] == dims:
                return DirectionalProfile(
                    2,
                    red.ker_dim,
                    _kernel_window(red.src_labels, red.kernel),
                    red.coker_dim,
                    _coker_window(red.coker_slots),
                    w,
                    (1,),
                    tuple(trace),
                )
            prev = (dims, red)
        return DirectionalProfile(
            2, trace[-1][1], None, trace[-1][2], None, None, (1,), tuple(trace)
        )
    # direction 1: require coefficients free of the outer variable, then the
    # computation is the same in every outer fiber
    A1 = C.matrices[0]

    def strip(x: TowerElement) -> TowerElement:
        if x.is_exactly_zero():
            return TowerElement.zero(1)
        if set(x.coeffs) - {0}:
            raise UnsupportedFrame(
                "direction-1 profiles need outer-variable-free coefficients"
            )
        return x.coefficient(0)

    a1 = strip(a)
    inner_rows = [[strip(A1[i2, j]) for j in range(C.rank)] for i2 in range(C.rank)]
    Ai = SeriesMatrix(inner_rows)
    I1 = SeriesMatrix.identity(TowerField(1), C.rank)
    op1 = MatrixDiffOp(C.rank, {1: I1.scale(a1), 0: Ai.scale(a1)})
    report = operator_index(op1, DEFAULT_SCHEDULE)
    ker_window = None
    if report.ker_basis:
        exps = []
        for vec in report.ker_basis:
            for x in vec:
                exps.extend(e for e in x.coeffs)
        if exps:
            ker_window = (min(exps), max(exps) + 1)
    return DirectionalProfile(
        1,
        report.ker_dim,
        ker_window,
        report.coker_dim,
        None,
        report.stabilized_at,
        (2,),
        report.trace,
    )
