from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ech_s1s2.poly import Poly
from ech_s1s2.profile import (
    LAMBDA0,
    DegenerateProfileError,
    FormProfile,
    ProfileDomainError,
    contact_certificate,
    evaluate_profile,
    exceptional_rotation,
    morse_bott_catalog,
    pole_reeb_field,
    reeb_field,
    technical_condition_check,
)
from ech_s1s2.surd import QSqrt6

SQ6 = math.sqrt(6.0)
# closed forms: a1 = 3u^2 - 1, a2 = sqrt6 (u^3 - u)
U_CONTRACTIBLE = 1 / math.sqrt(3.0)
U_DIAGONAL = (math.sqrt(3.0) - 1) / SQ6  # root of a1' + a2' = 0


def test_profile_values_at_poles_and_equator():
    assert evaluate_profile(LAMBDA0, 0.0) == pytest.approx((2.0, 0.0))
    assert evaluate_profile(LAMBDA0, math.pi / 2) == pytest.approx((-1.0, 0.0), abs=1e-15)
    with pytest.raises(ProfileDomainError):
        evaluate_profile(LAMBDA0, -0.1)


@given(st.floats(0.01, math.pi - 0.01))
@settings(max_examples=100)
def test_derivative_polynomials_match_finite_differences(theta):
    h = 1e-5
    f = lambda t: np.array(LAMBDA0.coefficients(t))  # noqa: E731
    num1 = (f(theta + h) - f(theta - h)) / (2 * h)
    num2 = (f(theta + h) - 2 * f(theta) + f(theta - h)) / (h * h)
    assert np.allclose(LAMBDA0.first_derivatives(theta), num1, atol=1e-7)
    assert np.allclose(LAMBDA0.second_derivatives(theta), num2, atol=1e-3)


@given(st.floats(0.01, math.pi - 0.01))
@settings(max_examples=100)
def test_reeb_field_normalised_and_in_kernel(theta):
    a1, a2 = LAMBDA0.coefficients(theta)
    d1, d2 = LAMBDA0.first_derivatives(theta)
    r = reeb_field(LAMBDA0, theta)
    assert a1 * r.dt + a2 * r.dphi == pytest.approx(1.0)
    assert d1 * r.dt + d2 * r.dphi == pytest.approx(0.0, abs=1e-9)


def test_reeb_field_rejects_poles():
    with pytest.raises(ProfileDomainError):
        reeb_field(LAMBDA0, 0.0)
    assert pole_reeb_field(LAMBDA0, 0).dt == pytest.approx(0.5)


def test_contact_certificate_round_and_bad():
    cert = contact_certificate(LAMBDA0)
    assert cert.passed and cert.margin < 0
    bad = FormProfile.custom([1], [0, 0, 1])  # a x a' changes sign at the equator
    bad_cert = contact_certificate(bad)
    assert not bad_cert.passed
    with pytest.raises(DegenerateProfileError):
        morse_bott_catalog(bad, 10.0)


def test_round_catalog_has_five_families():
    cat = morse_bott_catalog(LAMBDA0, 10.0)
    got = [(round(f.theta0, 9), f.m, f.n, f.homology_class) for f in cat.families]
    expected_theta = [
        math.acos(U_CONTRACTIBLE),
        math.acos(U_DIAGONAL),
        math.pi / 2,
        math.acos(-U_DIAGONAL),
        math.acos(-U_CONTRACTIBLE),
    ]
    assert [g[0] for g in got] == pytest.approx(expected_theta, abs=1e-9)
    assert [(g[1], g[2], g[3]) for g in got] == [(0, -1, 0), (-1, -1, 1), (-1, 0, 1), (-1, 1, 1), (0, 1, 0)]
    contractible_action = 4 * math.pi * math.sqrt(2) / 3
    diagonal_action = 2 * math.pi * abs((3 * U_DIAGONAL**2 - 1) + SQ6 * (U_DIAGONAL**3 - U_DIAGONAL))
    assert [f.action for f in cat.families] == pytest.approx(
        [contractible_action, diagonal_action, 2 * math.pi, diagonal_action, contractible_action], abs=1e-9
    )
    assert cat.winding_bound == 2


def test_small_cutoff_has_no_families():
    assert morse_bott_catalog(LAMBDA0, 1.0).families == []


def test_catalog_grows_with_cutoff():
    small = {(round(f.theta0, 9), f.m, f.n) for f in morse_bott_catalog(LAMBDA0, 10.0).families}
    large = {(round(f.theta0, 9), f.m, f.n) for f in morse_bott_catalog(LAMBDA0, 20.0).families}
    assert small < large


@pytest.mark.parametrize("pole", [0, "pi"])
def test_exceptional_rotation_exact(pole):
    data = exceptional_rotation(LAMBDA0, pole)
    assert data.rotation_lift == QSqrt6(0, 1, 2)
    assert data.rotation == QSqrt6(-2, 1, 2)
    assert data.action == pytest.approx(4 * math.pi)


def test_technical_condition_on_round_catalog():
    cat = morse_bott_catalog(LAMBDA0, 10.0)
    rep = technical_condition_check(LAMBDA0, cat.families)
    assert rep.passed and rep.worst < 0


def test_sigma_invariance():
    assert LAMBDA0.is_sigma_invariant()
    assert not LAMBDA0.rescaled(Poly.of([0, 1])).is_sigma_invariant()


def test_equator_shear_rate_closed_form():
    # r * action at the equator gives the shear 2 pi sqrt 6
    assert float(LAMBDA0.shear_rate(math.pi / 2)) * 2 * math.pi == pytest.approx(2 * math.pi * SQ6)


def test_identity_rescaling_and_degenerate_pair():
    same = LAMBDA0.rescaled(Poly())
    assert evaluate_profile(same, 0.7) == evaluate_profile(LAMBDA0, 0.7)
    assert not contact_certificate(FormProfile.custom([1], [0])).passed


def test_reeb_field_at_equator_and_pole():
    r = reeb_field(LAMBDA0, math.pi / 2)
    assert (r.dt, r.dphi) == pytest.approx((-1.0, 0.0), abs=1e-12)
    assert pole_reeb_field(LAMBDA0, "pi").dt == pytest.approx(0.5)


def test_modified_profile_is_contact_and_technical():
    from fractions import Fraction

    from ech_s1s2.perturb import taubes_modifier

    profile = LAMBDA0.rescaled(taubes_modifier(Fraction(1, 10), 2))
    assert contact_certificate(profile).passed
    rep = technical_condition_check(profile, morse_bott_catalog(profile, 10.0).families)
    assert rep.passed


def test_technical_condition_fails_when_sign_flipped():
    flipped = FormProfile.custom(LAMBDA0.q1.coeffs, (-LAMBDA0.q2).coeffs)
    fams = morse_bott_catalog(LAMBDA0, 10.0).families
    assert not technical_condition_check(flipped, fams).passed


def test_quarter_rotation_after_modification():
    from fractions import Fraction

    from ech_s1s2.perturb import taubes_modifier

    profile = LAMBDA0.rescaled(taubes_modifier(Fraction(1, 4), 2))
    assert exceptional_rotation(profile, 0).rotation == QSqrt6(1, 0, 4)
