"""Tower series arithmetic: windows, inversion, derivations, residues."""

import random
from fractions import Fraction

import pytest

from higherlocal.errors import (
    InsufficientPrecision,
    LevelMismatch,
    UndeterminedLeadingTerm,
    ZeroDivisionSeries,
)
from higherlocal.series import (
    OneForm,
    TowerElement,
    TowerField,
    exterior_derivative,
    residue,
)

F1 = TowerField(1)
F2 = TowerField(2)


def random_element(rng, field, lo=-3, hi=4, density=0.7, exact=True, inner_span=None):
    """A random Laurent polynomial (exact) over the field."""
    level = field.level
    if inner_span is None:
        inner_span = (lo, hi)

    def build(lvl):
        coeffs = {}
        span = (lo, hi) if lvl == level else inner_span
        for e in range(span[0], span[1]):
            if rng.random() > density:
                continue
            if lvl == 1:
                c = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
            else:
                c = build(lvl - 1)
            coeffs[e] = c
        return TowerElement(lvl, coeffs, None, True)

    el = build(level)
    if not exact:
        el = el.truncate(hi - 1)
    return el


class TestBasicArithmetic:
    def test_polynomial_identity(self):
        t = F1.gen(1)
        assert (1 + t) * (1 - t) == 1 - t * t + F1.zero()
        prod = (F1.one() + t) * (F1.one() - t)
        assert prod.exact
        assert prod.coeffs == {0: Fraction(1), 2: Fraction(-1)}

    def test_monomial_cancellation(self):
        t = F1.gen(1)
        assert (t ** -1 * t) == F1.one()

    def test_truncated_product_window(self):
        t = F1.gen(1)
        a = F1.one().truncate(3)  # 1 + O(t^3)
        p = a * t
        assert not p.exact
        assert p.hi == 4
        assert p.coeffs == {1: Fraction(1)}

    def test_addition_window_intersection(self):
        t = F1.gen(1)
        a = (1 + t).truncate(5)
        b = (t ** -2).truncate(2)
        s = a + b
        assert s.hi == 2
        assert s.coeffs == {-2: Fraction(1), 0: Fraction(1), 1: Fraction(1)}

    def test_level_mismatch_raises(self):
        with pytest.raises(LevelMismatch):
            F1.gen(1) * F2.gen(2)

    def test_scalar_mixing(self):
        t = F1.gen(1)
        assert (Fraction(1, 2) * t + t / 2) == t
        assert (3 - t) + t == F1.rational(3)


class TestInversion:
    def test_geometric_series(self):
        t = F1.gen(1)
        inv = (F1.one() - t).invert(prec=6)
        for e in range(6):
            assert inv.coefficient(e) == 1
        assert inv.hi == 6 and not inv.exact

    def test_valuation_negated(self):
        t = F1.gen(1)
        a = t ** 2 * (1 + t)
        assert a.invert().valuation() == -2

    def test_zero_division(self):
        with pytest.raises(ZeroDivisionSeries):
            F1.zero().invert()

    def test_undetermined_leading_term(self):
        fuzzy = TowerElement.inexact_zero(1, 2)  # O(t^2)
        with pytest.raises(UndeterminedLeadingTerm):
            fuzzy.invert()

    def test_monomial_inverse_exact(self):
        t = F1.gen(1)
        inv = (2 * t ** 3).invert()
        assert inv.exact
        assert inv.coeffs == {-3: Fraction(1, 2)}

    def test_two_sided_inverse_random(self):
        rng = random.Random(7)
        checked = 0
        while checked < 200:
            a = random_element(rng, F1)
            if not a.is_certainly_nonzero():
                continue
            inv = a.invert(prec=12)
            assert (a * inv).agrees_with(1)
            assert (inv * a).agrees_with(1)
            checked += 1

    def test_level2_inverse(self):
        t1, t2 = F2.gen(1), F2.gen(2)
        a = t1 + t2  # unit with leading coefficient t1 at t2^0
        inv = a.invert(prec=8)
        assert (a * inv).agrees_with(1)


class TestRingAxioms:
    def test_associativity_distributivity(self):
        rng = random.Random(11)
        for _ in range(60):
            a = random_element(rng, F1)
            b = random_element(rng, F1)
            c = random_element(rng, F1)
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c

    def test_level2_ring_axioms_windowed(self):
        rng = random.Random(13)
        for _ in range(25):
            a = random_element(rng, F2, lo=-2, hi=3, inner_span=(-1, 2))
            b = random_element(rng, F2, lo=-2, hi=3, inner_span=(-1, 2))
            c = random_element(rng, F2, lo=-2, hi=3, inner_span=(-1, 2))
            assert ((a * b) * c).agrees_with(a * (b * c))
            assert (a * (b + c)).agrees_with(a * b + a * c)


class TestDerivation:
    def test_power_rule(self):
        t = F1.gen(1)
        assert (t ** 5).derive(1) == 5 * t ** 4
        assert (t ** -2).derive(1) == -2 * t ** -3

    def test_constant_derivative_zero(self):
        assert F2.rational(7).derive(1).is_exactly_zero()
        assert F2.rational(7).derive(2).is_exactly_zero()

    def test_inner_derivative_acts_coefficientwise(self):
        t1, t2 = F2.gen(1), F2.gen(2)
        f = t1 * t2 + t1 ** 2
        assert f.derive(1) == t2 + 2 * t1

    def test_index_out_of_range(self):
        with pytest.raises(LevelMismatch):
            F1.gen(1).derive(2)

    def test_leibniz_random(self):
        rng = random.Random(3)
        for _ in range(60):
            a = random_element(rng, F1)
            b = random_element(rng, F1)
            assert (a * b).derive(1) == a.derive(1) * b + a * b.derive(1)

    def test_schwarz_symmetry(self):
        rng = random.Random(5)
        for _ in range(25):
            a = random_element(rng, F2, lo=-2, hi=3, inner_span=(-2, 3))
            assert a.derive(1).derive(2) == a.derive(2).derive(1)

    def test_derivative_window_shifts(self):
        a = TowerElement(1, {0: Fraction(1), 2: Fraction(3)}, 5, False)
        d = a.derive(1)
        assert d.hi == 4
        assert d.coeffs == {1: Fraction(6)}


class TestResidue:
    def test_simple_pole(self):
        t = F1.gen(1)
        assert residue(t ** -1) == 1

    def test_other_powers_vanish(self):
        t = F1.gen(1)
        for k in (-3, -2, 0, 1, 4):
            assert residue(t ** k) == 0

    def test_two_variable_residue(self):
        f = F2.monomial([-1, -1])
        assert residue(f) == 1
        assert residue(F2.monomial([0, -1])) == 0
        assert residue(F2.monomial([-1, 0])) == 0

    def test_insufficient_precision(self):
        fuzzy = TowerElement.inexact_zero(1, -1)  # O(t^-1): -1 unknown
        with pytest.raises(InsufficientPrecision):
            residue(fuzzy)

    def test_residue_of_derivative_vanishes(self):
        rng = random.Random(17)
        for _ in range(80):
            f = random_element(rng, F1)
            assert residue(f.derive(1)) == 0
        for _ in range(30):
            f = random_element(rng, F2, lo=-2, hi=3, inner_span=(-2, 3))
            assert residue(f.derive(2)) == 0
            # residue in the inner variable of an inner derivative also dies
            assert residue(f.derive(1)) == 0


class TestOneForms:
    def test_exterior_derivative_closed(self):
        t1, t2 = F2.gen(1), F2.gen(2)
        # d of a function is always closed
        f = t1 ** -1 * t2 + t1 * t2 ** 2
        assert exterior_derivative(f).is_closed()

    def test_non_closed_witness(self):
        t2 = F2.gen(2)
        zero = F2.zero()
        nu = OneForm((t2, zero))  # t2 dt1
        w = nu.closedness_witness()
        assert w is not None
        assert w[0] == (1, 2)

    def test_dlog_forms_closed(self):
        t1, t2 = F2.gen(1), F2.gen(2)
        nu = OneForm((t1 ** -1, F2.zero()))
        assert nu.is_closed()
        nu2 = OneForm((F2.zero(), t2 ** -1))
        assert nu2.is_closed()


class TestRendering:
    def test_level1(self):
        t = F1.gen(1)
        assert F1.render(1 - t ** 2 + F1.zero()) == "1 - t1^2"
        assert F1.render(F1.zero()) == "0"
        assert F1.render((F1.one()).truncate(3)) == "1 + O(t1^3)"

    def test_level2(self):
        t1, t2 = F2.gen(1), F2.gen(2)
        s = F2.render(t1 * t2 ** -1 + 2 * t2)
        assert s == "t1*t2^-1 + 2*t2"

    def test_negative_rational(self):
        t = F1.gen(1)
        assert F1.render(-Fraction(3, 4) * t) == "-3/4*t1"
