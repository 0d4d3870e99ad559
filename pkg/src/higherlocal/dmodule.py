"""Scalar differential operators over k((t)) and their invariants.

Connections over the one-variable field are converted to monic scalar
operators through a certified cyclic vector; Newton polygons of the theta
form (theta = t d/dt) then give slopes and irregularity.  The conversion is
exact: the two operator forms are related by Stirling-number identities, and
the cyclic-vector certificate is an explicit matrix with a certified unit
determinant.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .connection import Connection
from .errors import SearchExhausted, UndeterminedPivot
from .linalg import SeriesMatrix, rank_kernel_det, solve
from .series import TowerElement, TowerField


# ---------------------------------------------------------------------------
# Wronskians
# ---------------------------------------------------------------------------

def wronskian(ys: Sequence[TowerElement]) -> TowerElement:
    """Determinant of the iterated-derivative matrix (y_i^(j-1))."""
    m = len(ys)
    if m == 0:
        raise ValueError("wronskian of an empty tuple")
    rows = []
    current = list(ys)
    for _ in range(m):
        rows.append(tuple(current))
        current = [y.derive(1) for y in current]
    M = SeriesMatrix(rows).transpose()  # row i = derivatives of y_i
    return _det_exact(M)


def _det_exact(M: SeriesMatrix) -> TowerElement:
    """Cofactor determinant; fine for the small sizes used here."""
    n = M.rows
    if n == 1:
        return M[0, 0]
    acc = None
    for j in range(n):
        x = M[0, j]
        if x.is_exactly_zero():
            continue
        minor = SeriesMatrix(
            [
                [M[i, jj] for jj in range(n) if jj != j]
                for i in range(1, n)
            ]
        )
        term = x * _det_exact(minor)
        if j % 2:
            term = -term
        acc = term if acc is None else acc + term
    return acc if acc is not None else TowerElement.zero(M.level)


# ---------------------------------------------------------------------------
# Scalar operators in d- and theta-form
# ---------------------------------------------------------------------------

def _stirling_first(n: int) -> List[List[int]]:
    """Signed Stirling numbers s(i, j): t^i d^i = sum_j s(i,j) theta^j."""
    s = [[0] * (n + 1) for _ in range(n + 1)]
    s[0][0] = 1
    for i in range(1, n + 1):
        for j in range(0, i + 1):
            s[i][j] = (s[i - 1][j - 1] if j > 0 else 0) - (i - 1) * s[i - 1][j]
    return s


def _stirling_second(n: int) -> List[List[int]]:
    """S(j, i): theta^j = sum_i S(j,i) t^i d^i."""
    S = [[0] * (n + 1) for _ in range(n + 1)]
    S[0][0] = 1
    for j in range(1, n + 1):
        for i in range(0, j + 1):
            S[j][i] = (S[j - 1][i - 1] if i > 0 else 0) + i * S[j - 1][i]
    return S


PARTIAL = "partial"
THETA = "theta"


@dataclass(frozen=True)
class ScalarOperator:
    """A monic scalar operator sum(a_i X^i) with X = d/dt or X = t d/dt."""

    form: str
    coeffs: Tuple[TowerElement, ...]  # a_0 .. a_m, a_m == 1

    def __post_init__(self):
        if self.form not in (PARTIAL, THETA):
            raise ValueError("form must be 'partial' or 'theta'")
        if len(self.coeffs) < 2:
            raise ValueError("order must be >= 1")
        if (self.coeffs[-1] - 1).is_certainly_nonzero():
            raise ValueError("operator must be monic")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def apply(self, f: TowerElement) -> TowerElement:
        acc = None
        d = f
        t = TowerElement.monomial(1, [1])
        for i, a in enumerate(self.coeffs):
            if i > 0:
                d = d.derive(1) if self.form == PARTIAL else t * d.derive(1)
            if a.is_exactly_zero():
                continue
            term = a * d
            acc = term if acc is None else acc + term
        assert acc is not None
        return acc

    def to_theta(self) -> "ScalarOperator":
        """Rewrite t^m * (this operator) in powers of theta; exact."""
        if self.form == THETA:
            return self
        m = self.order
        s = _stirling_first(m)
        t = TowerElement.monomial(1, [1])
        b = [TowerElement.zero(1) for _ in range(m + 1)]
        for i, a in enumerate(self.coeffs):
            if a.is_exactly_zero():
                continue
            scale = a * t ** (m - i)
            for j in range(i + 1):
                if s[i][j]:
                    b[j] = b[j] + scale * Fraction(s[i][j])
        return ScalarOperator(THETA, tuple(b))

    def to_partial(self) -> "ScalarOperator":
        """Rewrite in powers of d/dt and normalize monic; exact up to windows."""
        if self.form == PARTIAL:
            return self
        m = self.order
        S = _stirling_second(m)
        t = TowerElement.monomial(1, [1])
        a = [TowerElement.zero(1) for _ in range(m + 1)]
        for j, b in enumerate(self.coeffs):
            if b.is_exactly_zero():
                continue
            for i in range(j + 1):
                if S[j][i]:
                    a[i] = a[i] + b * (t ** i) * Fraction(S[j][i])
        lead_inv = a[m].invert()
        return ScalarOperator(PARTIAL, tuple(x * lead_inv for x in a))

    def render(self, field: TowerField) -> str:
        sym = "D" if self.form == PARTIAL else "theta"
        parts = []
        for i in range(self.order, -1, -1):
            a = self.coeffs[i]
            if a.is_exactly_zero():
                continue
            head = sym if i == 1 else (f"{sym}^{i}" if i > 1 else "")
            c = field.render(a)
            if i == 0:
                parts.append(f"({c})")
            elif c == "1":
                parts.append(head)
            else:
                parts.append(f"({c})*{head}")
        return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# Cyclic vectors
# ---------------------------------------------------------------------------

def _certificate_matrix(C: Connection, s: Sequence[TowerElement]) -> SeriesMatrix:
    cols = [tuple(s)]
    for _ in range(C.rank - 1):
        cols.append(C.nabla(1, cols[-1]))
    return SeriesMatrix(cols).transpose()


def _candidate_vectors(C: Connection, seed: int, random_tries: int):
    field = C.field
    r = C.rank
    t = field.gen(1)
    zero = field.zero()
    # deterministic shifted-monomial candidates first
    base_shifts = []
    if r == 1:
        base_shifts.append((0,))
    else:
        import itertools

        for perm in itertools.permutations(range(r)):
            base_shifts.append(perm)
    for shifts in base_shifts:
        yield tuple(t ** c for c in shifts)
    rng = random.Random(seed)
    for _ in range(random_tries):
        vec = []
        for _ in range(r):
            coeffs = {
                e: Fraction(rng.randint(-2, 2))
                for e in range(0, 3)
                if rng.random() < 0.6
            }
            vec.append(TowerElement(1, coeffs, None, True) if coeffs else zero)
        if all(v.is_exactly_zero() for v in vec):
            continue
        yield tuple(vec)


def find_cyclic_vector(
    C: Connection, seed: int = 0, random_tries: int = 60
) -> Tuple[Tuple[TowerElement, ...], SeriesMatrix, TowerElement]:
    """A vector whose iterated derivatives frame the module, with certificate.

    Returns (vector, certificate matrix, certificate determinant); the
    determinant is certified nonzero with finite valuation.
    """
    if C.field.level != 1:
        raise ValueError("cyclic vector search runs over the one-variable field")
    for cand in _candidate_vectors(C, seed, random_tries):
        M = _certificate_matrix(C, cand)
        try:
            res = rank_kernel_det(M, want_kernel=False)
        except UndeterminedPivot:
            continue
        if res.rank == C.rank and res.determinant.is_certainly_nonzero():
            return cand, M, res.determinant
    raise SearchExhausted(
        f"no cyclic vector certified after {random_tries} randomized candidates"
    )


def to_scalar_operator(
    C: Connection, s: Sequence[TowerElement], certificate: Optional[SeriesMatrix] = None
) -> ScalarOperator:
    """The monic operator annihilating the flat-section functional at s.

    With b_i = nabla^i s and the relation nabla^r s = sum x_i b_i, a flat
    section sum f_i b_i forces the single coordinate g = f_{r-1} to satisfy a
    monic order-r equation; this routine unrolls that recursion exactly.
    """
    r = C.rank
    if certificate is None:
        certificate = _certificate_matrix(C, s)
    top = C.nabla(1, certificate.column(r - 1))
    x = solve(certificate, top)
    a = [-xi for xi in x]  # nabla^r s + sum a_i nabla^i s = 0
    one = TowerElement.constant(1, 1)
    zero = TowerElement.zero(1)

    # operators on the coordinate g are coefficient lists: P(g) = sum c_j g^(j)
    def op_sub(p, q):
        n = max(len(p), len(q))
        return [
            (p[i] if i < len(p) else zero) - (q[i] if i < len(q) else zero)
            for i in range(n)
        ]

    def op_d(p):
        # (d o P)(g) = sum (c_j' g^(j) + c_j g^(j+1))
        out = [zero] * (len(p) + 1)
        for j, c in enumerate(p):
            out[j] = out[j] + c.derive(1)
            out[j + 1] = out[j + 1] + c
        return out

    # a flat section sum f_i nabla^i s satisfies f_{i-1} = a_i g - f_i' with
    # g = f_{r-1}; the i = 0 relation gives the scalar equation for g
    P = [one]  # f_{r-1} = g
    for i in range(r - 1, 0, -1):
        P = op_sub([a[i]], op_d(P))
    L = op_sub(op_d(P), [a[0]])
    if (r - 1) % 2:
        L = [-c for c in L]
    return ScalarOperator(PARTIAL, tuple(L))


# ---------------------------------------------------------------------------
# Newton polygons
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NewtonPolygon:
    """Lower hull of the theta-form coefficient valuations.

    ``points`` are the finite lattice points (j, v(b_j)); ``vertices`` the
    lower-hull vertices left to right; ``slopes`` the edge slopes with their
    horizontal multiplicities in ascending order.  The irregularity is the
    total rise along edges of positive slope, a non-negative integer.
    """

    points: Tuple[Tuple[int, int], ...]
    vertices: Tuple[Tuple[int, int], ...]
    slopes: Tuple[Tuple[Fraction, int], ...]
    irregularity: int


def _lower_hull(points: List[Tuple[int, int]]) -> List[Tuple[int, int]]:
    pts = sorted(points)
    hull: List[Tuple[int, int]] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point when it lies on or above the chord
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def newton_polygon(L: ScalarOperator) -> NewtonPolygon:
    """Hull, slopes and irregularity of the operator's theta form."""
    theta = L.to_theta()
    points = []
    for j, b in enumerate(theta.coeffs):
        if b.is_exactly_zero():
            continue
        points.append((j, b.valuation()))
    vertices = _lower_hull(points)
    slopes: List[Tuple[Fraction, int]] = []
    irregularity = 0
    for (x1, y1), (x2, y2) in zip(vertices, vertices[1:]):
        slope = Fraction(y2 - y1, x2 - x1)
        slopes.append((slope, x2 - x1))
        if slope > 0:
            rise = y2 - y1
            irregularity += rise
    assert irregularity >= 0
    return NewtonPolygon(tuple(points), tuple(vertices), tuple(slopes), irregularity)


def connection_irregularity(C: Connection, seed: int = 0) -> int:
    """Irregularity through a certified cyclic vector, an exact invariant."""
    s, cert, _ = find_cyclic_vector(C, seed=seed)
    L = to_scalar_operator(C, s, cert)
    return newton_polygon(L).irregularity
