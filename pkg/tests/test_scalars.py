"""Exact scalar ring: arithmetic, enclosures, comparison, text round-trip."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hahnlog.errors import DomainError, UndecidedComparison
from hahnlog.scalars import (
    Ordering,
    SymbolicReal,
    compare,
    evaluate,
    log_of_rational,
    log_prime,
    parse_scalar,
    rational_power,
    root_constant,
    sign,
)

LOG2 = SymbolicReal.constant(log_prime(2))
LOG3 = SymbolicReal.constant(log_prime(3))
HALF = SymbolicReal.from_fraction(Fraction(1, 2))

# reference values frozen from standard tables (15+ digits)
LOG2_REF = Fraction("0.69314718055994530941723")
LOG3_REF = Fraction("1.09861228866810969139525")
SQRT2_REF = Fraction("1.41421356237309504880169")


def frac(n, d=1):
    return SymbolicReal.from_fraction(Fraction(n, d))


class TestArithmetic:
    def test_difference_of_squares(self):
        one = SymbolicReal.one()
        assert (LOG2 + one) * (LOG2 - one) == LOG2 * LOG2 - one

    def test_absorbing_zero(self):
        zero = SymbolicReal.zero()
        for a in (LOG2, LOG2 * LOG3 + HALF, frac(-7, 3)):
            assert a * zero == zero

    def test_like_term_collection(self):
        a = LOG3.scale(2)
        b = HALF - LOG3
        assert a + b == LOG3 + HALF

    def test_pow(self):
        assert LOG2**3 == LOG2 * LOG2 * LOG2
        assert LOG2**0 == SymbolicReal.one()

    def test_divide_exact(self):
        product = (LOG2 + frac(1)) * LOG3
        assert product.divide_exact(LOG3) == LOG2 + frac(1)
        assert product.divide_exact(LOG2) is None
        assert (LOG2.scale(3)).divide_exact(frac(3)) == LOG2


class TestLogOfRational:
    def test_twelve(self):
        assert log_of_rational(12) == LOG2.scale(2) + LOG3

    def test_one_is_zero(self):
        assert log_of_rational(1) == SymbolicReal.zero()

    def test_three_halves(self):
        assert log_of_rational(Fraction(3, 2)) == LOG3 - LOG2

    def test_multiplicative(self):
        for p, q in [(Fraction(4, 9), Fraction(15, 2)), (Fraction(7), Fraction(7))]:
            assert log_of_rational(p * q) == log_of_rational(p) + log_of_rational(q)

    def test_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            log_of_rational(0)
        with pytest.raises(DomainError):
            log_of_rational(Fraction(-3))


class TestRationalPower:
    def test_perfect_square(self):
        assert rational_power(4, Fraction(1, 2)) == frac(2)

    def test_splits_perfect_part(self):
        root2 = SymbolicReal.constant(root_constant(2, Fraction(1, 2)))
        assert rational_power(8, Fraction(1, 2)) == root2.scale(2)

    def test_integer_exponent(self):
        assert rational_power(Fraction(2, 3), Fraction(-2)) == frac(9, 4)

    def test_declared_logarithm(self):
        symbol = root_constant(3, Fraction(1, 2))
        assert symbol.log_value == LOG3.scale(Fraction(1, 2))


class TestEvaluateCompare:
    def test_evaluate_zero(self):
        iv = evaluate(SymbolicReal.zero(), Fraction(1, 10**9))
        assert iv.lo == iv.hi == 0

    def test_evaluate_log2(self):
        iv = evaluate(LOG2, Fraction(1, 1000))
        assert iv.width() <= Fraction(1, 1000)
        assert iv.contains(LOG2_REF)

    def test_evaluate_product(self):
        iv = evaluate(LOG2 * LOG3, Fraction(1, 100))
        assert iv.contains(LOG2_REF * LOG3_REF)
        assert iv.width() <= Fraction(1, 100)

    def test_evaluate_nesting(self):
        wide = evaluate(LOG2 * LOG3 + HALF, Fraction(1, 10))
        narrow = evaluate(LOG2 * LOG3 + HALF, Fraction(1, 10**8))
        assert wide.encloses(narrow)

    def test_compare_log2_seven_tenths(self):
        assert compare(LOG2, frac(7, 10)) is Ordering.LT

    def test_compare_reflexive(self):
        for a in (LOG2, LOG2 * LOG3 - HALF, frac(0)):
            assert compare(a, a) is Ordering.EQ

    def test_log6_canonicalizes(self):
        assert compare(LOG2 + LOG3, log_of_rational(6)) is Ordering.EQ

    def test_sqrt2(self):
        root2 = SymbolicReal.constant(root_constant(2, Fraction(1, 2)))
        iv = evaluate(root2, Fraction(1, 10**6))
        assert iv.contains(SQRT2_REF)
        assert sign(root2 - frac(141421, 100000)) == 1
        assert sign(root2 - frac(141422, 100000)) == -1

    def test_undecided_raises(self):
        # numerically tiny but symbolically nonzero difference
        delta = LOG2 - LOG2 + frac(1, 2**300) * LOG3
        with pytest.raises(UndecidedComparison):
            compare(delta, SymbolicReal.zero(), max_width=Fraction(1, 2**64))

    def test_compare_respects_addition(self):
        c = LOG3 * LOG2 - frac(5)
        assert compare(LOG2, frac(1)) is Ordering.LT
        assert compare(LOG2 + c, frac(1) + c) is Ordering.LT


class TestTextForm:
    def test_canonical_example(self):
        a = LOG2.scale(2) + LOG3 + HALF
        assert a.render() == "2*log(2) + log(3) + 1/2"

    def test_round_trip(self):
        values = [
            SymbolicReal.zero(),
            frac(-3, 4),
            LOG2.scale(2) + LOG3 + HALF,
            LOG2 * LOG2 - LOG3.scale(Fraction(1, 3)),
            SymbolicReal.constant(root_constant(2, Fraction(1, 2))) * LOG3 - frac(7),
        ]
        for a in values:
            assert parse_scalar(a.render()) == a

    def test_degree_sorting(self):
        a = frac(1) + LOG2 * LOG3 + LOG2
        text = a.render()
        assert text.index("log(2)*log(3)") < text.index("log(2) ")


# hypothesis strategies over a small constant pool
_atoms = st.sampled_from([SymbolicReal.one(), LOG2, LOG3, LOG2 * LOG3])
_fracs = st.fractions(min_value=-4, max_value=4, max_denominator=6)
_scalars = st.builds(
    lambda pairs: sum(
        (a.scale(q) for a, q in pairs), start=SymbolicReal.zero()
    ),
    st.lists(st.tuples(_atoms, _fracs), min_size=0, max_size=3),
)


@settings(max_examples=60, deadline=None)
@given(_scalars, _scalars, _scalars)
def test_ring_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a - a == SymbolicReal.zero()


@settings(max_examples=40, deadline=None)
@given(_scalars, st.fractions(min_value=Fraction(1, 64), max_value=1, max_denominator=64))
def test_enclosure_soundness(a, width):
    iv = evaluate(a, width)
    assert iv.width() <= width
    tighter = evaluate(a, width / 8)
    assert iv.encloses(tighter)
