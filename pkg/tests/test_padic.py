"""Scalar arithmetic, square classes and the Hilbert symbol."""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gspinlat.errors import MixedField, PrecisionExhausted
from gspinlat.padic import (
    DEFAULT_PREC,
    PadicElement,
    SquareClass,
    hilbert_classes,
    hilbert_symbol,
    legendre,
    padic,
    quad_ext_poly,
    square_class,
    teichmueller_generator,
)


def schoolbook_digits(value: Fraction, p: int, v: int, k: int) -> list:
    """Independent digit oracle: base-p digits of p^-v * value, computed by
    repeated exact division (value must have valuation exactly v)."""
    x = value / Fraction(p) ** v
    digits = []
    for _ in range(k):
        num, den = x.numerator, x.denominator
        d = (num * pow(den, -1, p)) % p
        digits.append(d)
        x = (x - d) / p
    return digits


class TestArithmetic:
    def test_inverse_of_one(self):
        one = padic(1, 5)
        inv = one.inverse()
        assert inv.valuation() == 0
        assert inv.prec == DEFAULT_PREC
        assert inv == one

    def test_p_times_p_inverse(self):
        p = 7
        x = padic(p, p)
        y = x.inverse()
        prod = x * y
        assert prod.valuation() == 0
        assert prod == padic(1, p)

    @pytest.mark.parametrize("p", [3, 5, 7])
    def test_one_plus_p_times_one_minus_p(self, p):
        a = padic(1 + p, p)
        b = padic(1 - p, p)
        prod = a * b
        expected = Fraction(1 - p * p)
        assert prod.valuation() == 0
        got = [d[0] for d in prod.digits(DEFAULT_PREC)]
        assert got == schoolbook_digits(expected, p, 0, DEFAULT_PREC)

    def test_schoolbook_oracle_on_fractions(self):
        p = 3
        x = padic(Fraction(7, 10), p)
        got = [d[0] for d in x.digits(20)]
        assert got == schoolbook_digits(Fraction(7, 10), p, 0, 20)

    def test_cancellation_gives_bounded_zero(self):
        p = 5
        a = padic(17, p)
        z = a - a
        assert z.is_bounded_zero
        assert z.zero_bound() == DEFAULT_PREC
        with pytest.raises(PrecisionExhausted):
            z.valuation()

    def test_precision_of_sum_tracks_worst_operand(self):
        p = 5
        a = PadicElement.from_unit(p, 1, 0, (1,), 10)
        b = padic(1, p)
        assert (a + b).prec == 10

    def test_mixed_field_rejected(self):
        with pytest.raises(MixedField):
            padic(1, 3) + padic(1, 5)
        with pytest.raises(MixedField):
            padic(1, 3) * padic(1, 3, f=2)

    def test_encode_decode_roundtrip(self):
        p = 3
        x = padic(Fraction(14, 5), p)
        y = PadicElement.decode(x.encode(), p)
        assert x == y
        w = padic(Fraction(2, 7), p, f=2)
        assert PadicElement.decode(w.encode(), p, f=2) == w


@given(a=st.integers(-400, 400), b=st.integers(-400, 400), c=st.integers(-400, 400))
@settings(max_examples=60, deadline=None)
def test_ring_axioms(a, b, c):
    p = 5
    xa, xb, xc = (padic(t, p) for t in (a, b, c))
    assert (xa + xb) * xc == xa * xc + xb * xc
    assert xa * (xb * xc) == (xa * xb) * xc
    assert xa + xb == xb + xa


class TestFrobenius:
    def test_fixes_rational_integers(self):
        p = 5
        for n in (7, -12, 125, 4):
            x = padic(n, p, f=2)
            assert x.frobenius() == x

    @given(a0=st.integers(-50, 50), a1=st.integers(-50, 50))
    @settings(max_examples=40, deadline=None)
    def test_order_two(self, a0, a1):
        p = 3
        x = padic(a0, p, f=2) + padic(a1, p, f=2) * teichmueller_generator(p)
        if x.is_zeroish:
            return
        assert x.frobenius().frobenius() == x

    @pytest.mark.parametrize("p", [3, 5, 7])
    def test_power_p_on_residue_field(self, p):
        w = teichmueller_generator(p)
        fw = w.frobenius()
        # frobenius reduces to x -> x^p on the residue field
        wp = w
        for _ in range(p - 1):
            wp = wp * w
        diff = fw - wp
        assert diff.is_zeroish or diff.valuation() >= 1

    def test_commutes_with_ring_ops(self):
        p = 5
        w = teichmueller_generator(p)
        x = padic(7, p, f=2) + w
        y = padic(3, p, f=2) * w + padic(2, p, f=2)
        assert (x + y).frobenius() == x.frobenius() + y.frobenius()
        assert (x * y).frobenius() == x.frobenius() * y.frobenius()
        assert x.inverse().frobenius() == x.frobenius().inverse()

    def test_fixed_space_is_exactly_rational_line(self):
        # on the residue basis (1, w) the fixed space of sigma has rank 1
        p = 5
        b, _ = quad_ext_poly(p)
        # sigma(c0 + c1 w) = (c0 - b c1) - c1 w; fixed mod p iff c1 = 0 (b may vanish)
        fixed = [(c0, c1) for c0 in range(p) for c1 in range(p)
                 if ((c0 - b * c1) % p, (-c1) % p) == (c0, c1)]
        assert fixed == [(c0, 0) for c0 in range(p)]


class TestSquareClass:
    def test_perfect_square(self):
        assert square_class(padic(9, 5)).label == "1"

    def test_valuation_parity(self):
        assert square_class(padic(3, 3)).label == "p"

    def test_exhaustive_legendre_oracle(self):
        p = 3
        squares_mod_p = {(x * x) % p for x in range(1, p)}
        cls = square_class(padic(18, p))  # 18 = 2 * 3^2, and 2 is a nonsquare mod 3
        assert (2 % p in squares_mod_p) == (not cls.nonsquare_unit)
        assert cls.label == "u"

    @given(a=st.integers(-1000, 1000).filter(lambda n: n != 0),
           b=st.integers(-1000, 1000).filter(lambda n: n != 0))
    @settings(max_examples=80, deadline=None)
    def test_homomorphism(self, a, b):
        p = 7
        ca = square_class(padic(a, p))
        cb = square_class(padic(b, p))
        assert ca * cb == square_class(padic(a * b, p))

    def test_klein_four_group(self):
        p = 5
        classes = [SquareClass(p, v, u) for v in (False, True) for u in (False, True)]
        assert len({c.label for c in classes}) == 4
        for c in classes:
            assert (c * c).label == "1"

    def test_needs_two_digits(self):
        x = PadicElement.from_unit(5, 1, 0, (2,), 1)
        with pytest.raises(PrecisionExhausted):
            square_class(x)


def brute_hilbert(a: int, b: int, p: int, k: int = 4) -> int:
    """Solvability oracle: +1 iff z^2 = a x^2 + b y^2 has a primitive
    solution mod p^k (sufficient depth for coefficient valuations <= 1)."""
    m = p**k
    squares = {}
    for z in range(m):
        squares.setdefault((z * z) % m, z)
    for x in range(m):
        for y in range(m):
            rhs = (a * x * x + b * y * y) % m
            if rhs in squares:
                z = squares[rhs]
                if x % p or y % p or z % p:
                    return 1
    return -1


class TestHilbertSymbol:
    def test_one_with_anything(self):
        p = 3
        for b in (2, 3, 6, -1, 5):
            assert hilbert_symbol(padic(1, p), padic(b, p)) == 1

    def test_two_three_at_p3(self):
        p = 3
        assert hilbert_symbol(padic(2, p), padic(3, p)) == -1
        assert brute_hilbert(2, 3, p) == -1

    def test_three_three_at_p3(self):
        p = 3
        assert hilbert_symbol(padic(3, p), padic(3, p)) == -1
        assert brute_hilbert(3, 3, p) == -1

    @pytest.mark.parametrize("p", [3, 5])
    def test_oracle_agrees_on_all_class_pairs(self, p):
        reps = [SquareClass(p, v, u).representative() for v in (0, 1) for u in (0, 1)]
        for a, b in itertools.product(reps, repeat=2):
            assert hilbert_symbol(padic(a, p), padic(b, p)) == brute_hilbert(a, b, p)

    @pytest.mark.parametrize("p", [3, 5, 7])
    def test_bimultiplicative_on_all_class_triples(self, p):
        classes = [SquareClass(p, v, u) for v in (False, True) for u in (False, True)]
        for ca, cb, cc in itertools.product(classes, repeat=3):
            assert hilbert_classes(ca, cb * cc) == hilbert_classes(ca, cb) * hilbert_classes(ca, cc)
            assert hilbert_classes(ca, cb) == hilbert_classes(cb, ca)

    @pytest.mark.parametrize("p", [3, 5, 7])
    def test_a_with_minus_a(self, p):
        for v in (False, True):
            for u in (False, True):
                c = SquareClass(p, v, u)
                a = c.representative()
                assert hilbert_symbol(padic(a, p), padic(-a, p)) == 1


def test_legendre_matches_table():
    assert legendre(2, 7) == 1
    assert legendre(3, 7) == -1
    assert legendre(2, 3) == -1
