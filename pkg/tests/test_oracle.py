"""Numerical oracle against the closed forms. The oracle never touches the
derivative polynomials, so agreement is an independent check."""

from __future__ import annotations

import math

import pytest

from ech_s1s2.oracle import (
    FlowState,
    IntegrationError,
    integrate_flow,
    linearized_return,
    measure_periods,
    period_convergence,
)
from ech_s1s2.perturb import taubes_modifier
from ech_s1s2.profile import LAMBDA0, MorseBottFamily, exceptional_rotation, morse_bott_catalog

from fractions import Fraction


@pytest.fixture(scope="module")
def families():
    return morse_bott_catalog(LAMBDA0, 10.0).families


def test_periods_match_actions(families):
    periods = measure_periods(LAMBDA0, families)
    for fam, period in zip(families, periods):
        assert period == pytest.approx(fam.action, abs=1e-6)


def test_step_halving_converges(families):
    assert period_convergence(LAMBDA0, families[2], 2**12) < 1e-8


def test_equator_monodromy_is_shear(families):
    eq = families[2]
    rep = linearized_return(LAMBDA0, eq)
    assert rep.classification == "degenerate-shear"
    assert rep.determinant == pytest.approx(1.0, abs=1e-8)
    assert rep.shear == pytest.approx(2 * math.pi * math.sqrt(6), abs=1e-6)


def test_shear_matches_rate_times_action(families):
    fam = families[1]
    rep = linearized_return(LAMBDA0, fam)
    assert rep.classification == "degenerate-shear"
    assert rep.shear == pytest.approx(float(LAMBDA0.shear_rate(fam.theta0)) * fam.action, rel=1e-6)


@pytest.mark.parametrize("pole", ["0", "pi"])
def test_pole_rotation_oracle(pole):
    rep = linearized_return(LAMBDA0, pole)
    assert rep.classification == "elliptic"
    assert rep.rotation == pytest.approx(math.sqrt(1.5) - 1, abs=1e-8)


def test_modified_pole_rotation_oracle():
    profile = LAMBDA0.rescaled(taubes_modifier(Fraction(1, 10), 2))
    rep = linearized_return(profile, "0")
    assert rep.rotation == pytest.approx(0.1, abs=1e-7)
    assert float(exceptional_rotation(profile, "0").rotation) == 0.1


def test_flow_preserves_normalisation_and_crosses_charts():
    # starting near the pole forces the Cartesian chart
    traj = integrate_flow(LAMBDA0, FlowState(0.0, 0.02, 0.0), 1.0, 1e-3)
    assert traj[0].in_pole_chart
    assert len(traj) == 1001
    assert traj[-1].theta == pytest.approx(0.02, abs=1e-6)  # theta is a first integral


def test_flow_rejects_bad_step():
    with pytest.raises(ValueError):
        integrate_flow(LAMBDA0, FlowState(0.0, 1.0, 0.0), 1.0, 0.0)


def test_family_inside_pole_chart_is_refused():
    fam = MorseBottFamily(0.01, 0, 1, 1.0)
    with pytest.raises(IntegrationError):
        measure_periods(LAMBDA0, [fam])


def test_equator_orbit_closes():
    traj = integrate_flow(LAMBDA0, FlowState(0.0, math.pi / 2, 0.0), 2 * math.pi, 2 * math.pi / 4096)
    end = traj[-1]
    # the Reeb field is -d_t here, so t winds once backwards
    assert end.t == pytest.approx(-2 * math.pi, abs=1e-6)
    assert end.theta == pytest.approx(math.pi / 2, abs=1e-9)


def test_pole_orbit_advances_t():
    traj = integrate_flow(LAMBDA0, FlowState(0.0, 0.0, 0.0), 4 * math.pi, 4 * math.pi / 2048)
    assert traj[-1].t == pytest.approx(2 * math.pi, abs=1e-6)
    assert traj[-1].theta == pytest.approx(0.0, abs=1e-9)


def test_zero_duration():
    start = FlowState(0.0, 1.0, 0.0)
    assert integrate_flow(LAMBDA0, start, 0.0, 0.1) == [start]


def test_pole_period():
    from ech_s1s2.oracle import measure_period

    assert measure_period(LAMBDA0, "0") == pytest.approx(4 * math.pi, abs=1e-6)
