"""JSON documents: profiles, orbit lists, formal curves, weight requests, manifold summaries.

Every writer sorts keys so identical inputs give byte-identical output.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .generators import ManifoldSummary, WeightedComponent
from .index import (
    GENERIC,
    CoverData,
    End,
    FormalCurveComponent,
)
from .perturb import ELLIPTIC, OrbitCatalog, ReebOrbit, to_exact
from .poly import Poly
from .profile import FormProfile
from .surd import QSqrt6


class DocumentError(ValueError):
    pass


def dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, default=_default) + "\n"


def _default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, QSqrt6):
        return obj.to_json()
    if hasattr(obj, "to_json"):
        return obj.to_json()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def load(path: str) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


# scalars -------------------------------------------------------------------------


def parse_coefficient(value) -> QSqrt6:
    """``"1/2*sqrt6"``, ``3``, ``{"rational": .., "sqrt6": ..}`` or ``[num, den, surd_num, surd_den]``."""
    if isinstance(value, list):
        if len(value) != 4:
            raise DocumentError(f"coefficient list must have four integers, got {value!r}")
        num, den, snum, sden = value
        return QSqrt6.from_parts(Fraction(num, den), Fraction(snum, sden))
    try:
        return QSqrt6.from_json(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise DocumentError(f"bad coefficient {value!r}: {exc}") from exc


def parse_exact(value):
    """Exact number from a document value; strings keep surds, floats keep their binary value."""
    if isinstance(value, dict):
        q = parse_coefficient(value)
        return q.rational_part if q.is_rational() else q
    try:
        return to_exact(value)
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"bad number {value!r}") from exc


# profiles ------------------------------------------------------------------------


def parse_profile(doc: dict) -> FormProfile:
    """``{"base": "taubes" | "custom", "q1": [...], "q2": [...], "exponent": [...]}``.

    Coefficients are listed from the constant term up, as polynomials in ``cos theta``.
    ``q1``/``q2`` are required only for the custom base.
    """
    if not isinstance(doc, dict):
        raise DocumentError("profile document must be an object")
    base = doc.get("base", "taubes")
    exponent = Poly.of([parse_coefficient(c) for c in doc.get("exponent", doc.get("f_coeffs", []))])
    if base == "taubes":
        return FormProfile.taubes(exponent)
    if base == "custom":
        try:
            q1 = [parse_coefficient(c) for c in doc["q1"]]
            q2 = [parse_coefficient(c) for c in doc["q2"]]
        except KeyError as exc:
            raise DocumentError(f"custom profile needs {exc.args[0]}") from exc
        return FormProfile.custom(q1, q2, exponent.coeffs)
    raise DocumentError(f"unknown profile base {base!r}")


# orbits --------------------------------------------------------------------------


def parse_orbit(doc: dict) -> ReebOrbit:
    """``{"name", "kind", "action", "homology_class", "rotation"?, "action_interval"?}``."""
    try:
        name, kind = doc["name"], doc["kind"]
        action = parse_exact(doc["action"])
    except KeyError as exc:
        raise DocumentError(f"orbit needs {exc.args[0]}") from exc
    interval = doc.get("action_interval")
    interval = (action, action) if interval is None else tuple(parse_exact(v) for v in interval)
    rot = doc.get("rotation")
    if kind == ELLIPTIC and rot is None:
        raise DocumentError(f"elliptic orbit {name} needs a rotation")
    rot = None if rot is None else parse_exact(rot)
    cutoff = doc.get("cutoff")
    try:
        return ReebOrbit(
            name,
            kind,
            action,
            interval,
            int(doc.get("homology_class", 0)),
            rot,
            cutoff=None if cutoff is None else parse_exact(cutoff),
        )
    except ValueError as exc:
        raise DocumentError(str(exc)) from exc


def parse_orbits(doc) -> list[ReebOrbit]:
    """A bare list of orbit objects or any document with an ``orbits`` list."""
    items = doc["orbits"] if isinstance(doc, dict) else doc
    orbits = [parse_orbit(o) for o in items]
    names = [o.name for o in orbits]
    if len(set(names)) != len(names):
        raise DocumentError("orbit names must be unique")
    return orbits


def orbit_lookup(orbits) -> dict[str, ReebOrbit]:
    if isinstance(orbits, OrbitCatalog):
        orbits = orbits.orbits
    return {o.name: o for o in orbits}


# formal curves -------------------------------------------------------------------


def parse_curve(doc: dict, orbits: dict[str, ReebOrbit]) -> FormalCurveComponent:
    """``{"name", "genus", "kind", "c_tau", "q_tau", "delta", "ends": [{"orbit", "multiplicity", "positive"}]}``."""
    ends = []
    for e in doc.get("ends", []):
        try:
            orbit = orbits[e["orbit"]]
        except KeyError as exc:
            raise DocumentError(f"unknown orbit {exc.args[0]!r} in curve {doc.get('name', '')!r}") from exc
        ends.append(End(orbit, int(e.get("multiplicity", 1)), bool(e.get("positive", False))))
    try:
        return FormalCurveComponent(
            int(doc.get("genus", 0)),
            tuple(ends),
            int(doc.get("c_tau", 0)),
            int(doc.get("q_tau", 0)),
            int(doc.get("delta", 0)),
            doc.get("kind", GENERIC),
            doc.get("name", ""),
        )
    except ValueError as exc:
        raise DocumentError(str(exc)) from exc


def parse_curve_document(doc: dict, catalog=None):
    """Curves and covers; orbits come from the document, else from ``catalog``.

    Returns ``(orbits, curves, covers)`` where each cover entry is
    ``(name, CoverData)`` built from ``{"base", "degree", "genus", "partition"}``.
    """
    if "orbits" in doc:
        lookup = orbit_lookup(parse_orbits(doc["orbits"]))
    elif catalog is not None:
        lookup = orbit_lookup(catalog)
    else:
        raise DocumentError("curve document has no orbits and no catalog was given")
    curves = [parse_curve(c, lookup) for c in doc.get("curves", [])]
    by_name = {c.name: c for c in curves}
    covers = []
    for i, cv in enumerate(doc.get("covers", [])):
        base = by_name.get(cv.get("base"))
        if base is None:
            raise DocumentError(f"cover {i} refers to unknown curve {cv.get('base')!r}")
        try:
            covers.append((cv.get("name", f"cover{i}"),
                           CoverData.plane_cover(base, int(cv["degree"]), int(cv.get("genus", 0)),
                                                 [int(p) for p in cv["partition"]])))
        except (KeyError, ValueError) as exc:
            raise DocumentError(f"cover {i}: {exc}") from exc
    return lookup, curves, covers


# weights and manifolds -------------------------------------------------------------


def parse_weight_request(doc: dict):
    """``{"components": [...], "hyperbolic_order": [...], "loop_order": [...], "ordering"?, "parities"?}``."""
    comps = []
    for i, c in enumerate(doc.get("components", [])):
        comps.append(
            WeightedComponent(
                int(c["index"]),
                tuple(c.get("hyperbolic_ends", [])),
                tuple(c.get("loops", [])),
                c.get("kind", GENERIC),
                int(c.get("multiplicity", 1)),
                None if c.get("weight") is None else int(c["weight"]),
                c.get("name", str(i)),
            )
        )
    return comps, list(doc.get("hyperbolic_order", [])), list(doc.get("loop_order", []))


def parse_manifold(doc: dict) -> ManifoldSummary:
    try:
        return ManifoldSummary(
            int(doc["chi"]),
            int(doc["sigma"]),
            int(doc["b1"]),
            int(doc["b2_plus"]),
            int(doc.get("n_untwisted", 0)),
            int(doc.get("n_twisted", 0)),
            {str(k): int(v) for k, v in doc.get("spin_c", {}).items()},
        )
    except KeyError as exc:
        raise DocumentError(f"manifold summary needs {exc.args[0]}") from exc
    except ValueError as exc:
        raise DocumentError(str(exc)) from exc
