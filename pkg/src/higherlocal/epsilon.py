"""Graded epsilon lines: integer degrees, experimental determinants, diagrams.

The degree attached to a connection and a frame tuple is computed along two
routes.  The certified route converts the connection to a scalar operator
through a cyclic vector and reads the degree off the Newton polygon; it is
an exact invariant of the connection, blind to the presentation.  The
windowed route realizes the frame-normalized covariant derivative on finite
windows and takes the stabilized kernel/cokernel difference; it is the
finite-dimensional realization of the comparison between the covariant and
wedge differentials of the length-2 binary complex, and it is reported next
to the certified value with an agreement flag.  On the catalog the two
routes agree; the certified value is the one returned.

Degrees over two variables are iterated: the outer direction is reduced to
its windowed kernel and cokernel with their induced inner connections, and
the degree is the alternating sum of the inner degrees.

The determinant component of the line is experimental: it is a ratio of
pseudo-determinants of matched symmetric windows against a reference
connection and carries an explicit normalization descriptor plus a
stabilization status.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from .connection import Connection, KummerCover, induct, kummer_pullback
from .derham import FormTuple, induced_inner_connections
from .dmodule import connection_irregularity
from .errors import (
    DegreeMismatch,
    SingularWindow,
    UnsupportedFrame,
)
from .series import OneForm, TowerElement, TowerField
from .tate import (
    DEFAULT_SCHEDULE,
    OUTER_SCHEDULE,
    IndexReport,
    MatrixDiffOp,
    operator_index,
)


@dataclass(frozen=True)
class SignConvention:
    """Global sign for the duality comparison; one value per verification run."""

    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")


@dataclass
class DetReport:
    value: Optional[Fraction]
    normalization: str
    status: str  # "stabilized" | "non-stabilizing" | "undefined"
    trace: Tuple[Fraction, ...] = ()


@dataclass
class GradedLine:
    degree: int
    det: Optional[DetReport] = None


@dataclass
class EpsilonReport:
    degree: int
    window_reports: Tuple[IndexReport, ...]
    window_degree: Optional[int]
    certified_degree: int
    routes_agree: Optional[bool]
    level_degrees: Tuple[int, ...] = ()  # per outer-cohomology level for n = 2

    def line(self) -> GradedLine:
        return GradedLine(self.degree)


def _single_form_normalizer(nu: FormTuple) -> TowerElement:
    return nu.frame[0, 0]


def _strip_inner(x: TowerElement) -> TowerElement:
    """A two-variable element constant in the outer variable, as inner element."""
    if x.is_exactly_zero():
        return TowerElement.zero(x.level - 1)
    if set(x.coeffs) - {0}:
        raise UnsupportedFrame(
            "the inner frame component must not involve the outer variable"
        )
    return x.coefficient(0)


def _exact_presentation(C: Connection) -> bool:
    return all(
        x.is_fully_exact() for M in C.matrices for row in M.entries for x in row
    )


def epsilon_degree(
    C: Connection,
    nu: FormTuple,
    schedule: Sequence[int] = DEFAULT_SCHEDULE,
    seed: int = 0,
) -> EpsilonReport:
    """Degree of the graded line comparing the covariant and wedge routes.

    The certified value comes from the cyclic-vector/Newton route and is a
    presentation-independent invariant.  The windowed realization is run
    alongside when the presentation is exact (a Laurent-polynomial matrix);
    window values of truncated presentations are dominated by their
    truncation hulls and are skipped rather than reported as if meaningful.
    """
    n = C.field.level
    if n == 1:
        h = _single_form_normalizer(nu)
        cert = -connection_irregularity(C, seed=seed)
        if _exact_presentation(C) and h.is_fully_exact():
            rep = operator_index(
                MatrixDiffOp.from_connection(C, normalizer=h),
                schedule,
                newton_prediction=cert,
                want_kernel=False,
            )
            window_degree = rep.index if rep.stabilized else None
            agree = (window_degree == cert) if window_degree is not None else None
            return EpsilonReport(cert, (rep,), window_degree, cert, agree)
        return EpsilonReport(cert, (), None, cert, None)
    if n != 2:
        raise UnsupportedFrame("degrees are implemented for n <= 2")
    if not nu.is_diagonal():
        raise UnsupportedFrame("two-variable degrees need a diagonal frame tuple")
    h2 = nu.frame[1, 1]
    if any(
        isinstance(c, TowerElement) and set(c.coeffs) - {0}
        for c in h2.coeffs.values()
    ):
        # the outer normalizer must commute with the inner derivative for
        # the iterated reduction to be well-formed
        raise UnsupportedFrame("the outer frame component must not involve t1")
    h1 = _strip_inner(nu.frame[0, 0])
    h0_level, h1_level, red, stabilized = induced_inner_connections(
        C, normalizer=h2, schedule=OUTER_SCHEDULE
    )
    level_degrees = []
    window_reports = []
    window_parts = []
    for lvl in (h0_level, h1_level):
        if lvl.dim == 0:
            level_degrees.append(0)
            window_parts.append(0)
            continue
        C_ind = Connection(TowerField(1), [lvl.matrix])
        cert = -connection_irregularity(C_ind, seed=seed)
        level_degrees.append(cert)
        if _exact_presentation(C_ind) and h1.is_fully_exact():
            rep = operator_index(
                MatrixDiffOp.from_connection(C_ind, normalizer=h1),
                schedule,
                newton_prediction=cert,
                want_kernel=False,
            )
            window_reports.append(rep)
            window_parts.append(rep.index if rep.stabilized else None)
        else:
            window_parts.append(None)
    degree = level_degrees[0] - level_degrees[1]
    if all(p is not None for p in window_parts):
        window_degree = window_parts[0] - window_parts[1]
    else:
        window_degree = None
    agree = (window_degree == degree) if window_degree is not None else None
    return EpsilonReport(
        degree,
        tuple(window_reports),
        window_degree,
        degree,
        agree,
        tuple(level_degrees),
    )


# ---------------------------------------------------------------------------
# Experimental relative determinant
# ---------------------------------------------------------------------------

def _symmetric_window_pseudo_det(op: MatrixDiffOp, w: int) -> Fraction:
    src_labels = [(c, e) for c in range(op.rank) for e in range(-w, w)]
    index = {lab: k for k, lab in enumerate(src_labels)}
    from .linalg import WindowMatrix

    from .errors import InsufficientPrecision

    columns = []
    for comp, e in src_labels:
        img = op.apply_to_monomial(comp, e)
        col = [Fraction(0)] * len(src_labels)
        for i, el in enumerate(img):
            if not el.knows(w - 1):
                raise InsufficientPrecision(
                    "normalizer precision too small for the determinant window"
                )
            for ee, q in el.coeffs.items():
                lab = (i, ee)
                if lab in index:
                    col[index[lab]] = q
        columns.append(col)
    entries = tuple(
        tuple(columns[j][i] for j in range(len(src_labels)))
        for i in range(len(src_labels))
    )
    return WindowMatrix(tuple(src_labels), tuple(src_labels), entries).pseudo_determinant()


def epsilon_det_rel(
    C: Connection,
    C_ref: Connection,
    nu: FormTuple,
    schedule: Sequence[int] = DEFAULT_SCHEDULE,
) -> DetReport:
    """Ratio of matched-window pseudo-determinants against a reference.

    Experimental: the status field reports whether the ratio settled over
    two consecutive windows; the full ratio trace is attached either way.
    """
    if C.field.level != 1:
        raise UnsupportedFrame("relative determinants are a one-variable experiment")
    da = epsilon_degree(C, nu).degree
    db = epsilon_degree(C_ref, nu).degree
    if da != db:
        raise DegreeMismatch(f"degrees differ: {da} vs {db}")
    h = _single_form_normalizer(nu)
    op = MatrixDiffOp.from_connection(C, normalizer=h)
    op_ref = MatrixDiffOp.from_connection(C_ref, normalizer=h)
    ratios = []
    for w in schedule:
        d1 = _symmetric_window_pseudo_det(op, w)
        d2 = _symmetric_window_pseudo_det(op_ref, w)
        if d2 == 0 or d1 == 0:
            raise SingularWindow(f"window {w} produced a zero pseudo-determinant")
        ratios.append(d1 / d2)
    normalization = (
        "pseudo-determinant ratio on symmetric windows [-w, w), "
        "component-major monomial order, reference rank "
        f"{C_ref.rank}"
    )
    if len(ratios) >= 2 and ratios[-1] == ratios[-2]:
        return DetReport(ratios[-1], normalization, "stabilized", tuple(ratios))
    return DetReport(None, normalization, "non-stabilizing", tuple(ratios))


# ---------------------------------------------------------------------------
# Diagram checks
# ---------------------------------------------------------------------------

def pullback_form_tuple(nu: FormTuple, cover: KummerCover) -> FormTuple:
    """Rewrite a base frame tuple on the cover via t = s^e.

    Components against dt_i for i < n pull back coefficient-wise; the
    outermost component picks up the Jacobian e s^(e-1).
    """
    e = cover.e
    n = nu.level
    field = TowerField(n)
    jac = TowerElement.monomial(n, [0] * (n - 1) + [e - 1], e)
    forms = []
    for form in nu.forms:
        comps = []
        for j, c in enumerate(form.components, start=1):
            cc = kummer_pullback(c, e)
            if j == n:
                cc = cc * jac
            comps.append(cc)
        forms.append(OneForm(comps))
    return FormTuple(forms)


def verify_induction(
    C_up: Connection, cover: KummerCover, nu: FormTuple, seed: int = 0
) -> Tuple[bool, int, int]:
    """Compare the degree upstairs (pulled-back frame) with the induced degree."""
    nu_up = pullback_form_tuple(nu, cover)
    up = epsilon_degree(C_up, nu_up, seed=seed).degree
    down = epsilon_degree(induct(C_up, cover), nu, seed=seed).degree
    return up == down, up, down


def verify_duality(
    C: Connection, nu: FormTuple, sigma: SignConvention = SignConvention(1), seed: int = 0
) -> Tuple[bool, int, int]:
    """Check degree(dual, -nu) = sigma * degree(C, nu)."""
    lhs = epsilon_degree(C.dual(), -nu, seed=seed).degree
    rhs = sigma.sign * epsilon_degree(C, nu, seed=seed).degree
    return lhs == rhs, lhs, rhs


def consistent_signs(instances, seed: int = 0) -> Tuple[int, ...]:
    """All global signs validating the duality comparison on every instance."""
    out = []
    for sign in (1, -1):
        sigma = SignConvention(sign)
        if all(verify_duality(C, nu, sigma, seed=seed)[0] for C, nu in instances):
            out.append(sign)
    return tuple(out)
