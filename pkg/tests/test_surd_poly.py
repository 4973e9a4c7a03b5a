from __future__ import annotations

import math
from decimal import Decimal, getcontext
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ech_s1s2.poly import ONE, U, Poly
from ech_s1s2.surd import SQRT6, QSqrt6, exact_floor, mod_one

getcontext().prec = 80
SQRT6_DEC = Decimal(6).sqrt()

ints = st.integers(-10**6, 10**6)
dens = st.integers(1, 10**4)
elements = st.builds(QSqrt6, ints, ints, dens)


def decimal_value(x: QSqrt6) -> Decimal:
    return (Decimal(x.a) + Decimal(x.b) * SQRT6_DEC) / Decimal(x.r)


@given(elements)
def test_floor_matches_high_precision(x):
    assert x.floor() == math.floor(decimal_value(x))


@given(elements)
def test_frac_in_unit_interval(x):
    f = x.frac()
    assert 0 <= f < 1
    assert (x - f).is_rational()


@given(elements, elements)
def test_field_laws(x, y):
    assert x + y == y + x
    assert x * y == y * x
    assert (x - y) + y == x
    if y != 0:
        assert (x / y) * y == x


@given(elements, elements)
def test_order_matches_decimal(x, y):
    assert (x < y) == (decimal_value(x) < decimal_value(y))


def test_sqrt6_squared():
    assert SQRT6 * SQRT6 == 6


@pytest.mark.parametrize(
    "text,expected",
    [
        ("sqrt(3/2)", QSqrt6(0, 1, 2)),
        ("1/2*sqrt6", QSqrt6(0, 1, 2)),
        ("-1 + 1/2*sqrt(6)", QSqrt6(-2, 1, 2)),
        ("0.05", QSqrt6(1, 0, 20)),
        ("3", QSqrt6(3)),
    ],
)
def test_parse(text, expected):
    assert QSqrt6.parse(text) == expected


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        QSqrt6.parse("two")


def test_json_round_trip():
    x = QSqrt6(-2, 1, 2)
    assert QSqrt6.from_json(x.to_json()) == x


def test_pole_rotation_mod_one():
    # sqrt(3/2) = 1.2247..., so the class mod 1 is sqrt(3/2) - 1
    assert mod_one(QSqrt6(0, 1, 2)) == QSqrt6(-2, 1, 2)
    assert exact_floor(QSqrt6(0, 1, 2)) == 1
    assert exact_floor(Fraction(-1, 2)) == -1


polys = st.lists(st.builds(QSqrt6, st.integers(-20, 20), st.integers(-20, 20), st.integers(1, 5)), max_size=5).map(Poly.of)


@given(polys, polys)
@settings(max_examples=50)
def test_poly_ring_laws(p, q):
    assert p + q == q + p
    assert p * q == q * p
    assert (p * q).deriv() == p.deriv() * q + p * q.deriv()


@given(polys, polys)
@settings(max_examples=50)
def test_divmod_identity(p, q):
    if q.is_zero():
        return
    quot, rem = p.divmod(q)
    assert quot * q + rem == p
    assert rem.is_zero() or rem.degree < q.degree


@given(polys, st.integers(-3, 3))
@settings(max_examples=50)
def test_exact_and_float_evaluation_agree(p, u):
    assert float(p(u)) == pytest.approx(float(p.evalf(float(u))), rel=1e-9, abs=1e-9)


def test_parity_helpers():
    assert (U * U + ONE).is_even()
    assert (U * U * U - U).is_odd()
    assert Poly().is_zero()
