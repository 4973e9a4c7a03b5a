from __future__ import annotations

import math
from decimal import Decimal, getcontext
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ech_s1s2.checks import partitions
from ech_s1s2.index import (
    FAIL,
    GENERIC,
    NOT_APPLICABLE,
    PASS,
    UNCERTIFIED,
    CoverData,
    CurrentDecomposition,
    End,
    FormalCurveComponent,
    IncompleteInputError,
    RelativeClass,
    auto_transversality,
    cover_index,
    current_index_bound,
    cz,
    cz_one_window,
    cz_sum,
    ech_index,
    fredholm_index,
    index_inequality_check,
    l_positive_check,
    partition_check,
    pullback_operator_index,
    self_intersection,
    super_rigidity_certificate,
)
from ech_s1s2.perturb import ELLIPTIC, NEG_HYP, POS_HYP, ReebOrbit
from ech_s1s2.surd import QSqrt6

getcontext().prec = 60
PLANE_ROT = QSqrt6(-2, 1, 2)


def elliptic(rot, action=1, name=None):
    return ReebOrbit.model(ELLIPTIC, rot, action=action, name=name)


def test_cz_examples():
    assert cz(elliptic(PLANE_ROT), 5) == 3
    assert cz(ReebOrbit.model(POS_HYP), 7) == 0
    assert cz(ReebOrbit.model(NEG_HYP), 3) == 3
    with pytest.raises(ValueError):
        cz(elliptic(PLANE_ROT), 0)


rotations = st.builds(QSqrt6, st.integers(-100, 100), st.integers(-10, 10), st.integers(1, 30)).filter(
    lambda q: q.frac() != 0
)


@given(rotations, st.integers(1, 40))
@settings(max_examples=200)
def test_cz_parity_and_decimal_oracle(rot, m):
    value = cz(elliptic(rot), m)
    assert value % 2 == 1
    if rot.is_rational():
        expected = math.floor(rot.rational_part * m)
    else:
        expected = math.floor((Decimal(rot.a) + Decimal(rot.b) * Decimal(6).sqrt()) / Decimal(rot.r) * m)
    assert value == 2 * expected + 1


@given(rotations, st.integers(1, 12))
@settings(max_examples=100)
def test_plane_cover_index_closed_form(rot, d):
    plane = FormalCurveComponent.special_plane(elliptic(rot))
    expected = d - sum(2 * math.floor(rot * k) + 1 for k in range(1, d + 1))
    assert ech_index(plane, d) == expected
    assert cz_sum(plane.ends[0].orbit, d) == sum(cz(plane.ends[0].orbit, k) for k in range(1, d + 1))


def test_special_plane_table():
    plane = FormalCurveComponent.special_plane(elliptic(PLANE_ROT))
    assert [ech_index(plane, d) for d in range(1, 7)] == [0, 0, 0, 0, -2, -4]
    assert fredholm_index(plane) == 0


def test_sphere_and_negative_hyperbolic_plane():
    sphere = FormalCurveComponent.exceptional_sphere()
    assert [ech_index(sphere, d) for d in range(1, 7)] == [0, -2, -6, -12, -20, -30]
    plane = FormalCurveComponent(0, (End(ReebOrbit.model(NEG_HYP), 1),), c_tau=1)
    assert [ech_index(plane, d) for d in range(1, 7)] == [0, -1, -3, -6, -10, -15]


def test_kind_validation():
    with pytest.raises(ValueError):
        FormalCurveComponent(0, (End(ReebOrbit.model(POS_HYP), 1),), c_tau=1, kind="special-plane")
    with pytest.raises(ValueError):
        FormalCurveComponent(0, (), c_tau=1, q_tau=0, kind="exceptional-sphere")
    with pytest.raises(ValueError):
        FormalCurveComponent(0, kind="no-such-kind")


def test_cover_index_examples():
    plane = FormalCurveComponent.special_plane(elliptic(Fraction(1, 50)))
    ident = CoverData.plane_cover(plane, 1, 0, [1])
    assert cover_index(ident).index == 0 and pullback_operator_index(ident) == 0
    rep = cover_index(CoverData.plane_cover(plane, 3, 0, [1, 1, 1]))
    assert rep.index == 4 and rep.branch_points == 4 and rep.identity_value == 4
    assert rep.certificate.status == PASS
    two = CoverData.plane_cover(plane, 2, 0, [1, 1])
    assert cover_index(two).index == 2 and two.branch_points == 2
    assert pullback_operator_index(two) == 2 - 2 * 2


@given(st.integers(1, 10), st.integers(0, 5), st.data())
@settings(max_examples=100)
def test_cover_identity_and_super_rigidity(d, g, data):
    part = data.draw(st.sampled_from(list(partitions(d))))
    plane = FormalCurveComponent.special_plane(elliptic(Fraction(1, 11)))
    cover = CoverData.plane_cover(plane, d, g, part)
    rep = cover_index(cover)
    assert rep.identity_value == rep.index
    assert rep.index >= rep.branch_points
    cert = super_rigidity_certificate(cover)
    assert cert.status == PASS and cert.margin == -2 * len(part)


def test_cover_validation():
    plane = FormalCurveComponent.special_plane(elliptic(Fraction(1, 50)))
    with pytest.raises(ValueError):
        CoverData.plane_cover(plane, 3, 0, [1, 1])


def test_super_rigidity_guard_and_torus():
    plane = FormalCurveComponent.special_plane(elliptic(Fraction(3, 10)))
    assert super_rigidity_certificate(CoverData.plane_cover(plane, 4, 0, [4])).status == NOT_APPLICABLE
    torus = FormalCurveComponent.special_torus()
    assert super_rigidity_certificate(CoverData.build(torus, 3, 2, ())).status == UNCERTIFIED


def test_auto_transversality():
    assert auto_transversality(FormalCurveComponent.exceptional_sphere()).status == PASS
    assert auto_transversality(FormalCurveComponent.special_plane(elliptic(PLANE_ROT))).margin == -2
    torus = auto_transversality(FormalCurveComponent.special_torus())
    assert torus.status == UNCERTIFIED and torus.margin == 0


def test_index_inequality_flags_inconsistent_data():
    bad = FormalCurveComponent(0, (), c_tau=1, q_tau=-1, delta=1, kind=GENERIC)
    assert ech_index(bad) == 0 and fredholm_index(bad) == 0
    assert index_inequality_check(bad).status == FAIL


def test_self_intersection():
    assert self_intersection(FormalCurveComponent.special_torus(), 10) == 0
    plane = FormalCurveComponent.special_plane(elliptic(Fraction(1, 20), action=1))
    assert self_intersection(plane, 10) == 0  # 1/20 < 1/10, so the end is rho-positive
    assert self_intersection(FormalCurveComponent.exceptional_sphere(), 10) == -1


def test_l_positive_and_window():
    assert l_positive_check(elliptic(Fraction(1, 10)), 5) is True
    assert l_positive_check(elliptic(Fraction(1, 5)), 5) is False
    assert l_positive_check(ReebOrbit.model(POS_HYP), 5) is None
    w = cz_one_window(elliptic(Fraction(1, 20)), 10)
    assert w.last_multiplicity == 19 and w.required == 9 and w.meets_requirement
    w = cz_one_window(elliptic(Fraction(3, 10)), 10)
    assert w.last_multiplicity == 3 and not w.meets_requirement


def test_partition_check():
    orbit = elliptic(Fraction(1, 5))
    assert partition_check(orbit, 4, [1, 1, 1, 1], True) is True
    assert partition_check(orbit, 4, [4], False) is True
    assert partition_check(orbit, 4, [2, 2], True) is False
    assert partition_check(orbit, 5, [5], False) is None


def test_relative_class_concatenation_adds_indices():
    e, h = elliptic(PLANE_ROT, name="e"), ReebOrbit.model(POS_HYP, name="h")
    upper = RelativeClass(2, 1, ((e, 3),), ((e, 1), (h, 1)))
    lower = RelativeClass(1, 0, ((e, 1), (h, 1)), ())
    assert upper.concatenate(lower).ech_index() == upper.ech_index() + lower.ech_index()
    with pytest.raises(ValueError):
        upper.concatenate(RelativeClass(0, 0, ((e, 2),), ()))


def test_current_bound_examples():
    sphere = FormalCurveComponent.exceptional_sphere()
    for m in (1, 2, 3):
        rep = current_index_bound(CurrentDecomposition([], [(sphere, m)], e_dot_a=[-1]), 10, target=0)
        assert rep.bound == m * (m - 1)
        assert rep.attained == (m == 1)
    plane = FormalCurveComponent.special_plane(elliptic(Fraction(1, 50)))
    base = current_index_bound(CurrentDecomposition([(plane, 1), (plane, 1)], curve_pairs={(0, 1): 0}), 10)
    crossed = current_index_bound(CurrentDecomposition([(plane, 1), (plane, 1)], curve_pairs={(0, 1): 1}), 10)
    assert crossed.bound - base.bound == 2
    assert not crossed.diagnostics["cross_terms_zero"]
    with pytest.raises(IncompleteInputError):
        current_index_bound(CurrentDecomposition([(plane, 1), (plane, 1)]), 10)
