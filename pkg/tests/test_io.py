from __future__ import annotations

from fractions import Fraction

import pytest

from ech_s1s2.io import (
    DocumentError,
    dumps,
    parse_coefficient,
    parse_curve_document,
    parse_manifold,
    parse_orbits,
    parse_profile,
    parse_weight_request,
)
from ech_s1s2.profile import FormProfile
from ech_s1s2.surd import QSqrt6


def test_coefficient_forms_agree():
    half_root = QSqrt6.from_parts(Fraction(0), Fraction(1, 2))
    assert parse_coefficient("1/2*sqrt6") == half_root
    assert parse_coefficient([0, 1, 1, 2]) == half_root
    assert parse_coefficient(3) == QSqrt6.coerce(Fraction(3))
    with pytest.raises(DocumentError):
        parse_coefficient([1, 2, 3])
    with pytest.raises(DocumentError):
        parse_coefficient("sqrt(")


def test_profile_documents():
    assert parse_profile({"base": "taubes"}).to_json() == FormProfile.taubes().to_json()
    prof = parse_profile({"base": "custom", "q1": [1], "q2": [0, 1], "exponent": ["-1/2"]})
    assert prof.to_json()["base"] == "custom"
    with pytest.raises(DocumentError):
        parse_profile({"base": "custom", "q1": [1]})
    with pytest.raises(DocumentError):
        parse_profile({"base": "other"})
    with pytest.raises(DocumentError):
        parse_profile([1, 2])


def test_orbit_documents():
    orbits = parse_orbits([
        {"name": "e", "kind": "elliptic", "action": "3/2", "rotation": "1/7", "homology_class": 2},
        {"name": "h", "kind": "positive-hyperbolic", "action": 2, "action_interval": ["19/10", 2]},
    ])
    assert orbits[0].action == Fraction(3, 2) and orbits[0].homology_class == 2
    assert orbits[1].action_interval == (Fraction(19, 10), 2)
    with pytest.raises(DocumentError):
        parse_orbits([{"name": "e", "kind": "elliptic", "action": 1}])
    with pytest.raises(DocumentError):
        parse_orbits([{"name": "x", "kind": "positive-hyperbolic", "action": 1}] * 2)
    with pytest.raises(DocumentError):
        parse_orbits([{"kind": "elliptic", "action": 1, "rotation": 0}])


CURVES = {
    "orbits": [{"name": "e", "kind": "elliptic", "action": 1, "rotation": "1/20"}],
    "curves": [{"name": "plane", "genus": 0, "kind": "special-plane", "c_tau": 1,
                "ends": [{"orbit": "e", "multiplicity": 1, "positive": False}]}],
    "covers": [{"base": "plane", "degree": 2, "genus": 0, "partition": [2]}],
}


def test_curve_document():
    lookup, curves, covers = parse_curve_document(CURVES)
    assert set(lookup) == {"e"}
    assert curves[0].name == "plane" and len(curves[0].ends) == 1
    assert covers[0][0] == "cover0"
    bad = dict(CURVES, covers=[{"base": "nope", "degree": 2, "partition": [2]}])
    with pytest.raises(DocumentError):
        parse_curve_document(bad)
    with pytest.raises(DocumentError):
        parse_curve_document({"curves": []})
    with pytest.raises(DocumentError):
        parse_curve_document(dict(CURVES, curves=[{"ends": [{"orbit": "zz"}]}]))


def test_weight_and_manifold_documents():
    comps, hyp, loops = parse_weight_request(
        {"components": [{"index": 1, "hyperbolic_ends": ["h"], "loops": ["l"]}], "hyperbolic_order": ["h"], "loop_order": ["l"]}
    )
    assert comps[0].index == 1 and hyp == ["h"] and loops == ["l"]
    m = parse_manifold({"chi": 3, "sigma": 1, "b1": 0, "b2_plus": 1, "spin_c": {"a": 9}})
    assert m.spin_c == {"a": 9}
    with pytest.raises(DocumentError):
        parse_manifold({"chi": 3})
    with pytest.raises(DocumentError):
        parse_manifold({"chi": 3, "sigma": 1, "b1": 0, "b2_plus": 0})


def test_dumps_is_sorted_and_exact():
    text = dumps({"b": Fraction(1, 3), "a": QSqrt6.from_parts(Fraction(1), Fraction(0))})
    assert text.endswith("\n")
    assert text.index('"a"') < text.index('"b"')
    assert '"1/3"' in text
