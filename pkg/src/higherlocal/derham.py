"""De Rham complexes, cube multicomplexes and cohomology dimensions.

Given a flat connection and an independent tuple of closed 1-forms, the
complex of forms splits over the subsets of {1..n}: each vertex of the cube
is a copy of the underlying module identified through the wedge frame of the
tuple, each edge carries two maps, the directional covariant derivative
along the dual frame field (top differential) and the identity scaled by the
wedge sign (bottom differential).  Closedness of the tuple makes the dual
frame fields commute, so all squares anticommute; the checker verifies this
on explicit test sections and certifies per-direction boundedness of
kernel/cokernel windows.

Cohomology dimensions over two variables are computed along the outer
variable first: the windowed kernel and cokernel of the outer derivative are
finite-dimensional inner-field spaces carrying an induced inner connection,
whose windowed dimensions fill in the second page.  The same computation run
with the variables swapped provides an independent total, and the report
carries both.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from .connection import Connection
from .errors import (
    NotClosed,
    NotFlat,
    NotIndependent,
    UndeterminedPivot,
    UnsupportedFrame,
)
from .linalg import SeriesMatrix, inverse, rank_kernel_det
from .series import OneForm, TowerElement, TowerField
from .tate import (
    DEFAULT_SCHEDULE,
    OUTER_SCHEDULE,
    IndexReport,
    MatrixDiffOp,
    OuterMatrixDiffOp,
    OuterReduction,
    operator_index,
    reduce_outer_window,
)


# ---------------------------------------------------------------------------
# Frame tuples
# ---------------------------------------------------------------------------

class FormTuple:
    """An independent tuple of closed 1-forms (nu_1, ..., nu_n)."""

    __slots__ = ("forms", "frame", "frame_inverse")

    def __init__(self, forms: Sequence[OneForm]):
        forms = tuple(forms)
        if not forms:
            raise ValueError("empty form tuple")
        n = forms[0].level
        if len(forms) != n:
            raise NotIndependent("need exactly one form per variable")
        for nu in forms:
            if nu.level != n:
                raise NotIndependent("forms live over different fields")
        N = SeriesMatrix([list(nu.components) for nu in forms])
        try:
            res = rank_kernel_det(N, want_kernel=False)
        except UndeterminedPivot as exc:
            raise NotIndependent(str(exc))
        if res.rank < n or not res.determinant.is_certainly_nonzero():
            raise NotIndependent("component matrix of the tuple is singular")
        for nu in forms:
            w = nu.closedness_witness()
            if w is not None:
                (i, j), _ = w
                raise NotClosed(
                    f"form has a certified nonzero dt{i}^dt{j} exterior component"
                )
        self.forms = forms
        self.frame = N
        self.frame_inverse = inverse(N)

    @property
    def level(self) -> int:
        return len(self.forms)

    def __neg__(self) -> "FormTuple":
        return FormTuple(tuple(-nu for nu in self.forms))

    def dual_field(self, i: int) -> Tuple[TowerElement, ...]:
        """The vector field V_i with nu_j(V_i) = delta_ij, as d/dt coefficients."""
        return self.frame_inverse.column(i - 1)

    def is_diagonal(self) -> bool:
        n = self.level
        for i in range(n):
            for j in range(n):
                if i != j and self.frame[i, j].is_certainly_nonzero():
                    return False
        return True


def standard_forms(field: TowerField) -> FormTuple:
    """(dt_1, ..., dt_n)."""
    n = field.level
    forms = []
    for i in range(1, n + 1):
        comps = [field.zero()] * n
        comps[i - 1] = field.one()
        forms.append(OneForm(comps))
    return FormTuple(forms)


# ---------------------------------------------------------------------------
# The binary multicomplex on the cube
# ---------------------------------------------------------------------------

def _wedge_sign(M: frozenset, i: int) -> int:
    """Sign of nu_i ^ nu_M relative to the ascending wedge of M | {i}."""
    return -1 if sum(1 for m in M if m < i) % 2 else 1


@dataclass(frozen=True)
class EdgeOperator:
    """sign * (directional covariant derivative along a frame field)."""

    sign: int
    cvec: Tuple[TowerElement, ...]  # coefficients of d/dt_k
    pmat: SeriesMatrix  # sum c_k A_k

    def apply(self, section: Sequence[TowerElement]) -> Tuple[TowerElement, ...]:
        out = list(self.pmat.apply(section))
        for k, c in enumerate(self.cvec, start=1):
            if c.is_exactly_zero():
                continue
            for idx, v in enumerate(section):
                out[idx] = out[idx] + c * v.derive(k)
        if self.sign == 1:
            return tuple(out)
        return tuple(-x for x in out)

    def pure_direction(self) -> Optional[int]:
        nz = [
            k
            for k, c in enumerate(self.cvec, start=1)
            if c.is_certainly_nonzero()
        ]
        if len(nz) == 1 and all(
            c.is_exactly_zero() or k in nz
            for k, c in enumerate(self.cvec, start=1)
        ):
            return nz[0]
        return None


class BinaryMultiComplex:
    """Cube-indexed objects with covariant-derivative and wedge differentials."""

    def __init__(self, connection: Connection, forms: FormTuple):
        self.connection = connection
        self.forms = forms
        self.field = connection.field
        self.rank = connection.rank
        n = self.field.level
        self.n = n
        nabla_edges: Dict[Tuple[frozenset, int], EdgeOperator] = {}
        nu_edges: Dict[Tuple[frozenset, int], int] = {}
        fields = {i: forms.dual_field(i) for i in range(1, n + 1)}
        for size in range(n):
            for M in map(frozenset, combinations(range(1, n + 1), size)):
                for i in range(1, n + 1):
                    if i in M:
                        continue
                    sign = _wedge_sign(M, i)
                    cvec = fields[i]
                    pmat = None
                    for k, c in enumerate(cvec, start=1):
                        if c.is_exactly_zero():
                            continue
                        term = self.connection.matrices[k - 1].scale(c)
                        pmat = term if pmat is None else pmat + term
                    if pmat is None:
                        pmat = SeriesMatrix.zeros(self.field, self.rank, self.rank)
                    nabla_edges[(M, i)] = EdgeOperator(sign, tuple(cvec), pmat)
                    nu_edges[(M, i)] = sign
        self.nabla_edges = nabla_edges
        self.nu_edges = nu_edges

    def vertices(self):
        n = self.n
        out = []
        for size in range(n + 1):
            out.extend(map(frozenset, combinations(range(1, n + 1), size)))
        return out

    def with_zero_edge(self, M: frozenset, i: int) -> "BinaryMultiComplex":
        """A tampered copy with one covariant edge replaced by zero (for tests)."""
        import copy

        clone = copy.copy(self)
        edges = dict(self.nabla_edges)
        old = edges[(M, i)]
        zero = self.field.zero()
        edges[(M, i)] = EdgeOperator(
            old.sign,
            tuple(zero for _ in old.cvec),
            SeriesMatrix.zeros(self.field, self.rank, self.rank),
        )
        clone.nabla_edges = edges
        clone.nu_edges = dict(self.nu_edges)
        return clone


def build_multicomplex(C: Connection, forms: FormTuple) -> BinaryMultiComplex:
    if forms.level != C.field.level:
        raise NotIndependent("form tuple level does not match the connection")
    rep = C.check_flatness()
    if not rep.flat:
        raise NotFlat(f"curvature witness in variables {rep.witness[:2]}")
    return BinaryMultiComplex(C, forms)


# ---------------------------------------------------------------------------
# Multicomplex verification
# ---------------------------------------------------------------------------

@dataclass
class SquareFailure:
    face: Tuple
    kind: str
    detail: str


@dataclass
class DirectionResult:
    direction: int
    family: str  # "nabla" or "wedge"
    ok: bool
    detail: str
    trace: Tuple = ()


@dataclass
class MultiComplexReport:
    squares_ok: bool
    square_failures: List[SquareFailure]
    directions: List[DirectionResult]

    @property
    def acyclic(self) -> bool:
        return all(d.ok for d in self.directions)

    @property
    def ok(self) -> bool:
        return self.squares_ok and self.acyclic


def _test_sections(field: TowerField, rank: int, count: int = 2):
    """Deterministic monomial and small dense sections."""
    n = field.level
    zero = field.zero()
    sections = []
    exps_list = [[0] * n, [1] * n, [-1] * n]
    for exps in exps_list:
        for c in range(rank):
            vec = [zero] * rank
            vec[c] = field.monomial(exps)
            sections.append(tuple(vec))
    import random as _random

    rng = _random.Random(12345)
    for _ in range(count):
        vec = []
        for _ in range(rank):
            if n == 1:
                coeffs = {
                    e: Fraction(rng.randint(-2, 2)) for e in range(-1, 2)
                }
                vec.append(TowerElement(1, coeffs, None, True))
            else:
                coeffs = {}
                for e in range(-1, 2):
                    inner = TowerElement(
                        1,
                        {j: Fraction(rng.randint(-2, 2)) for j in range(-1, 2)},
                        None,
                        True,
                    )
                    coeffs[e] = inner
                vec.append(TowerElement(n, coeffs, None, True))
        sections.append(tuple(vec))
    return sections


def check_multicomplex(
    B: BinaryMultiComplex, schedule: Sequence[int] = OUTER_SCHEDULE
) -> MultiComplexReport:
    failures: List[SquareFailure] = []
    sections = _test_sections(B.field, B.rank)
    n = B.n

    def nabla(M, i, sec):
        return B.nabla_edges[(M, i)].apply(sec)

    def nu(M, i, sec):
        s = B.nu_edges[(M, i)]
        if s == 1:
            return tuple(sec)
        return tuple(x * Fraction(s) for x in sec)

    for size in range(n - 1):
        for M in map(frozenset, combinations(range(1, n + 1), size)):
            rest = [i for i in range(1, n + 1) if i not in M]
            for i, j in combinations(rest, 2):
                Mi, Mj = M | {i}, M | {j}
                routes = {
                    "nabla-nabla": lambda s: tuple(
                        a + b
                        for a, b in zip(
                            nabla(Mi, j, nabla(M, i, s)),
                            nabla(Mj, i, nabla(M, j, s)),
                        )
                    ),
                    "wedge-wedge": lambda s: tuple(
                        a + b
                        for a, b in zip(
                            nu(Mi, j, nu(M, i, s)), nu(Mj, i, nu(M, j, s))
                        )
                    ),
                    "nabla-wedge": lambda s: tuple(
                        a + b
                        for a, b in zip(
                            nu(Mi, j, nabla(M, i, s)),
                            nabla(Mj, i, nu(M, j, s)),
                        )
                    ),
                    "wedge-nabla": lambda s: tuple(
                        a + b
                        for a, b in zip(
                            nabla(Mi, j, nu(M, i, s)),
                            nu(Mj, i, nabla(M, j, s)),
                        )
                    ),
                }
                for kind, route in routes.items():
                    for sec in sections:
                        out = route(sec)
                        if any(x.is_certainly_nonzero() for x in out):
                            failures.append(
                                SquareFailure(
                                    (tuple(sorted(M)), i, j),
                                    kind,
                                    "route sum has a certified nonzero component",
                                )
                            )
                            break

    directions = []
    empty = frozenset()
    for i in range(1, n + 1):
        edge = B.nabla_edges[(empty, i)]
        directions.append(_direction_acyclicity(B, i, edge, schedule))
        s = B.nu_edges[(empty, i)]
        directions.append(
            DirectionResult(
                i,
                "wedge",
                abs(s) == 1,
                "scaled identity" if abs(s) == 1 else "wedge edge is not a unit",
            )
        )
    return MultiComplexReport(not failures, failures, directions)


def _direction_acyclicity(
    B: BinaryMultiComplex, i: int, edge: EdgeOperator, schedule
) -> DirectionResult:
    n = B.n
    if all(c.is_exactly_zero() for c in edge.cvec):
        return DirectionResult(
            i, "nabla", False, "covariant edge vanishes; window kernels grow"
        )
    pure = edge.pure_direction()
    if pure is None:
        return DirectionResult(
            i,
            "nabla",
            False,
            "frame field mixes directions; bounded-profile check unsupported",
        )
    if n == 1:
        op = MatrixDiffOp(
            B.rank, {1: SeriesMatrix.identity(B.field, B.rank).scale(edge.cvec[0]), 0: edge.pmat}
        )
        rep = operator_index(op, DEFAULT_SCHEDULE, want_kernel=False)
        return DirectionResult(
            1,
            "nabla",
            rep.stabilized,
            "windowed kernel/cokernel stabilized finite"
            if rep.stabilized
            else "window dimensions kept growing",
            rep.trace,
        )
    if pure == n:
        op = OuterMatrixDiffOp(
            B.rank,
            {
                1: SeriesMatrix.identity(B.field, B.rank).scale(edge.cvec[n - 1]),
                0: edge.pmat,
            },
        )
        trace = []
        prev = None
        for w in schedule:
            red = reduce_outer_window(op, w)
            dims = (red.ker_dim, red.coker_dim)
            trace.append((w, *dims))
            if prev == dims:
                return DirectionResult(
                    n, "nabla", True, "bounded outer window certified", tuple(trace)
                )
            prev = dims
        return DirectionResult(
            n, "nabla", False, "outer window dimensions kept growing", tuple(trace)
        )
    # inner pure direction: fiberwise when the data is outer-free, otherwise
    # exchange the variables and use the outer machinery
    try:
        op1 = _strip_to_inner_op(B.rank, edge)
    except UnsupportedFrame:
        try:
            c_sw = swap_variables(edge.cvec[0])
            p_sw = edge.pmat.map(swap_variables)
        except UnsupportedFrame as exc:
            return DirectionResult(pure, "nabla", False, str(exc))
        op = OuterMatrixDiffOp(
            B.rank,
            {1: SeriesMatrix.identity(B.field, B.rank).scale(c_sw), 0: p_sw},
        )
        trace = []
        prev = None
        for w in schedule:
            red = reduce_outer_window(op, w)
            dims = (red.ker_dim, red.coker_dim)
            trace.append((w, *dims))
            if prev == dims:
                return DirectionResult(
                    pure, "nabla", True, "bounded window certified after a variable swap", tuple(trace)
                )
            prev = dims
        return DirectionResult(
            pure, "nabla", False, "window dimensions kept growing", tuple(trace)
        )
    rep = operator_index(op1, DEFAULT_SCHEDULE, want_kernel=False)
    return DirectionResult(
        pure,
        "nabla",
        rep.stabilized,
        "fiberwise windowed dimensions stabilized"
        if rep.stabilized
        else "fiberwise window dimensions kept growing",
        rep.trace,
    )


def _strip_outer(x: TowerElement) -> TowerElement:
    if x.is_exactly_zero():
        return TowerElement.zero(x.level - 1)
    if set(x.coeffs) - {0}:
        raise UnsupportedFrame("inner-direction check needs outer-free coefficients")
    if not x.knows(1) and not x.exact:
        raise UnsupportedFrame("inner-direction check needs outer-free coefficients")
    return x.coefficient(0)


def _strip_to_inner_op(rank: int, edge: EdgeOperator) -> MatrixDiffOp:
    c1 = _strip_outer(edge.cvec[0])
    inner = SeriesMatrix(
        [
            [_strip_outer(edge.pmat[i, j]) for j in range(rank)]
            for i in range(rank)
        ]
    )
    I1 = SeriesMatrix.identity(TowerField(1), rank)
    return MatrixDiffOp(rank, {1: I1.scale(c1), 0: inner})


# ---------------------------------------------------------------------------
# Variable swap for the two-variable tower
# ---------------------------------------------------------------------------

def swap_variables(f: TowerElement) -> TowerElement:
    """Transpose a two-variable element: exchange the roles of t1 and t2."""
    if f.level != 2:
        raise UnsupportedFrame("swap is defined for two-variable elements")
    inner_bounds = []
    rows: Dict[int, Dict[int, Fraction]] = {}
    for e, c in f.coeffs.items():
        inner_bounds.append(None if c.exact else c.hi)
        for a, q in c.coeffs.items():
            rows.setdefault(a, {})[e] = q
    if not f.exact:
        # an unknown outer tail may hide arbitrary inner exponents
        raise UnsupportedFrame("swap needs an exact outer expansion")
    outer_hi = None
    for b in inner_bounds:
        if b is not None:
            outer_hi = b if outer_hi is None else min(outer_hi, b)
    inner_hi = None
    coeffs = {}
    for a, row in rows.items():
        coeffs[a] = TowerElement(1, row, inner_hi, inner_hi is None)
    return TowerElement(2, coeffs, outer_hi, outer_hi is None)


def swap_connection(C: Connection) -> Connection:
    """The same connection with the two variables exchanged."""
    if C.field.level != 2:
        raise UnsupportedFrame("swap is defined over two variables")
    A1, A2 = C.matrices
    return Connection(
        C.field,
        [A2.map(swap_variables), A1.map(swap_variables)],
    )


# ---------------------------------------------------------------------------
# Induced inner connections on windowed outer cohomology
# ---------------------------------------------------------------------------

@dataclass
class InducedLevel:
    """H^q of the outer direction as an inner-field connection."""

    dim: int
    matrix: Optional[SeriesMatrix]  # dim x dim over the inner field
    window: int


def _solve_in_columns(columns, target, level=1):
    """One exact solution x of (columns) x = target, or None if inconsistent."""
    if not columns:
        return None if any(t.is_certainly_nonzero() for t in target) else []
    nrows = len(columns[0])
    aug = [
        [col[r] for col in columns] + [target[r]] for r in range(nrows)
    ]
    ncols = len(columns)
    pivots = {}
    rrow = 0
    for c in range(ncols):
        best = None
        for i in range(rrow, nrows):
            cls, v = aug[i][c].classify_leading()
            if cls == "nonzero" and (best is None or v < best[0]):
                best = (v, i)
        if best is None:
            continue
        _, i = best
        aug[i], aug[rrow] = aug[rrow], aug[i]
        inv = aug[rrow][c].invert()
        aug[rrow] = [x * inv for x in aug[rrow]]
        for i2 in range(nrows):
            if i2 == rrow:
                continue
            x = aug[i2][c]
            if x.is_exactly_zero():
                continue
            aug[i2] = [a - x * b for a, b in zip(aug[i2], aug[rrow])]
        pivots[c] = rrow
        rrow += 1
    for i in range(rrow, nrows):
        if aug[i][ncols].is_certainly_nonzero():
            return None
    x = [TowerElement.zero(level)] * ncols
    for c, r in pivots.items():
        x[c] = aug[r][ncols]
    return x


def _section_from_slots(labels, vec, rank):
    """Slot-indexed inner coefficients -> per-component {outer exp: inner elt}."""
    comps = [dict() for _ in range(rank)]
    for k, (c, e) in enumerate(labels):
        x = vec[k]
        if isinstance(x, Fraction):
            if x == 0:
                continue
            x = TowerElement(1, {0: x}, None, True)
        if x.is_exactly_zero():
            continue
        comps[c][e] = x
    return comps


def _apply_inner_nabla(C: Connection, comps, window_of):
    """Apply the inner covariant derivative to slot data.

    ``window_of(i)`` gives the outer-exponent window kept for output
    component ``i``; contributions outside it are truncated away.
    """
    rank = C.rank
    A1 = C.matrices[0]
    out = [dict() for _ in range(rank)]
    for c in range(rank):
        lo_c, hi_c = window_of(c)
        for e, inner in comps[c].items():
            if e < lo_c or e >= hi_c:
                continue
            d = inner.derive(1)
            if not d.is_exactly_zero():
                out[c][e] = out[c].get(e, TowerElement.zero(1)) + d
    for i in range(rank):
        lo_i, hi_i = window_of(i)
        for j in range(rank):
            entry = A1[i, j]  # level-2 element
            if entry.is_exactly_zero():
                continue
            for m, am in entry.coeffs.items():
                for e, inner in comps[j].items():
                    ee = e + m
                    if ee < lo_i or ee >= hi_i:
                        continue
                    out[i][ee] = out[i].get(ee, TowerElement.zero(1)) + am * inner
    return out


def _slots_to_vector(labels, comps):
    vec = []
    for c, e in labels:
        vec.append(comps[c].get(e, TowerElement.zero(1)))
    return vec


def induced_inner_connections(
    C: Connection,
    normalizer: Optional[TowerElement] = None,
    schedule: Sequence[int] = OUTER_SCHEDULE,
) -> Tuple[InducedLevel, InducedLevel, OuterReduction, Optional[int]]:
    """Windowed outer H^0 / H^1 of a two-variable connection with inner action.

    Returns (H0 level, H1 level, the stabilized outer reduction, stabilized
    window).  The outer operator is the covariant derivative along the outer
    variable, scaled by the inverse of ``normalizer`` when given.
    """
    op = OuterMatrixDiffOp.from_connection(C, normalizer)
    prev = None
    red = None
    stabilized = None
    for w in schedule:
        red = reduce_outer_window(op, w)
        dims = (red.ker_dim, red.coker_dim)
        if prev == dims:
            stabilized = w
            break
        prev = dims
    assert red is not None
    w = red.window
    rank = C.rank
    # induced action on the kernel
    if red.ker_dim:
        columns = []
        for vec in red.kernel:
            comps = _section_from_slots(red.src_labels, vec, rank)
            img = _apply_inner_nabla(C, comps, lambda i: (-w, w))
            columns.append(_slots_to_vector(red.src_labels, img))
        # express each image in the kernel span
        h0_cols = []
        kernel_columns = [
            [vec[k] if not isinstance(vec[k], Fraction) else TowerElement(1, {0: vec[k]}, None, True) for k in range(len(red.src_labels))]
            for vec in red.kernel
        ]
        for img in columns:
            x = _solve_in_columns(kernel_columns, img)
            if x is None:
                raise UnsupportedFrame(
                    "induced action does not preserve the windowed kernel"
                )
            h0_cols.append(x)
        M0 = SeriesMatrix(
            [
                [h0_cols[j][i2] for j in range(red.ker_dim)]
                for i2 in range(red.ker_dim)
            ]
        )
        h0 = InducedLevel(red.ker_dim, M0, w)
    else:
        h0 = InducedLevel(0, None, w)
    # induced action on the cokernel
    if red.coker_dim:
        tgt_index = {lab: k for k, lab in enumerate(red.tgt_labels)}
        bounds: Dict[int, Tuple[int, int]] = {}
        for c, e in red.tgt_labels:
            lo, hi = bounds.get(c, (e, e + 1))
            bounds[c] = (min(lo, e), max(hi, e + 1))
        image_columns = _matrix_columns(red.matrix)
        rep_columns = []
        for c, e in red.coker_slots:
            vec = [TowerElement.zero(1)] * len(red.tgt_labels)
            vec[tgt_index[(c, e)]] = TowerElement.constant(1, 1)
            rep_columns.append(vec)
        h1_cols = []
        for c, e in red.coker_slots:
            comps = [dict() for _ in range(rank)]
            comps[c][e] = TowerElement.constant(1, 1)
            img = _apply_inner_nabla(
                C, comps, lambda i: bounds.get(i, (-w, w))
            )
            target = []
            for cc, ee in red.tgt_labels:
                target.append(img[cc].get(ee, TowerElement.zero(1)))
            x = _solve_in_columns(image_columns + rep_columns, target)
            if x is None:
                raise UnsupportedFrame(
                    "induced action leaves the windowed target span"
                )
            h1_cols.append(x[len(image_columns):])
        M1 = SeriesMatrix(
            [
                [h1_cols[j][i2] for j in range(red.coker_dim)]
                for i2 in range(red.coker_dim)
            ]
        )
        h1 = InducedLevel(red.coker_dim, M1, w)
    else:
        h1 = InducedLevel(0, None, w)
    return h0, h1, red, stabilized


def _matrix_columns(M: SeriesMatrix):
    return [[M[i, j] for i in range(M.rows)] for j in range(M.cols)]


# ---------------------------------------------------------------------------
# Cohomology reports
# ---------------------------------------------------------------------------

@dataclass
class CohomologyReport:
    level: int
    dims: Tuple[int, ...]
    euler: int
    stabilized: bool
    e2: Optional[Dict[Tuple[int, int], int]] = None
    total_dims: Optional[Tuple[int, ...]] = None
    euler_consistent: Optional[bool] = None
    index_report: Optional[IndexReport] = None
    window_dims: Optional[Tuple[int, ...]] = None
    window_agrees: Optional[bool] = None


def _inner_connection_dims(level_data: InducedLevel) -> Tuple[int, int, bool]:
    if level_data.dim == 0:
        return (0, 0, True)
    C1 = Connection(TowerField(1), [level_data.matrix])
    rep = operator_index(MatrixDiffOp.from_connection(C1), want_kernel=False)
    from .dmodule import connection_irregularity

    irr = connection_irregularity(C1)
    return (rep.ker_dim, rep.ker_dim + irr, rep.stabilized)


def cohomology_dims(
    C: Connection,
    schedule: Sequence[int] = OUTER_SCHEDULE,
    index_schedule: Sequence[int] = DEFAULT_SCHEDULE,
) -> CohomologyReport:
    """Windowed cohomology dimensions with a certified degree-one side.

    The degree-zero dimension is the persistent windowed kernel, a
    presentation-independent quantity.  The degree-one dimension is
    normalized through the certified irregularity (the windowed Euler
    characteristic on the standard lattice equals minus the irregularity);
    the raw windowed cokernel is computed alongside and compared, since its
    value is sensitive to hull-widening changes of presentation.
    """
    n = C.field.level
    if n == 1:
        from .dmodule import connection_irregularity

        irr = connection_irregularity(C)
        rep = operator_index(
            MatrixDiffOp.from_connection(C),
            index_schedule,
            newton_prediction=-irr,
            want_kernel=False,
        )
        h0 = rep.ker_dim
        dims = (h0, h0 + irr)
        window_dims = (rep.ker_dim, rep.coker_dim) if rep.stabilized else None
        return CohomologyReport(
            1,
            dims,
            -irr,
            rep.stabilized,
            index_report=rep,
            window_dims=window_dims,
            window_agrees=None if window_dims is None else window_dims == dims,
        )
    if n != 2:
        raise UnsupportedFrame("cohomology dimensions are implemented for n <= 2")
    h0, h1, red, stabilized = induced_inner_connections(C, schedule=schedule)
    k0, c0, s0 = _inner_connection_dims(h0)
    k1, c1, s1 = _inner_connection_dims(h1)
    e2 = {(0, 0): k0, (1, 0): c0, (0, 1): k1, (1, 1): c1}
    dims = (e2[(0, 0)], e2[(1, 0)] + e2[(0, 1)], e2[(1, 1)])
    euler = dims[0] - dims[1] + dims[2]
    # independent total through the swapped filtration
    total = None
    euler_consistent = None
    try:
        Cs = swap_connection(C)
        g0, g1, _, st2 = induced_inner_connections(Cs, schedule=schedule)
        kk0, cc0, _ = _inner_connection_dims(g0)
        kk1, cc1, _ = _inner_connection_dims(g1)
        total = (kk0, cc0 + kk1, cc1)
        euler_consistent = (total[0] - total[1] + total[2]) == euler
    except UnsupportedFrame:
        pass
    return CohomologyReport(
        2,
        dims,
        euler,
        stabilized is not None and s0 and s1,
        e2=e2,
        total_dims=total,
        euler_consistent=euler_consistent,
    )
