"""Command-line front end.

Exit status: 0 when every requested check passes, 1 when a check or constraint
fails, 2 on unusable input.
"""

from __future__ import annotations

import argparse
import csv
import io as _stdio
import json
import math
import sys
from fractions import Fraction

from . import checks
from .generators import (
    closed_case_check,
    enumerate_with_borderline,
    epsilon_sign,
    gate_check,
    parity_audit,
    rho_gate,
    spin_c_dimension,
    tensor_ordering_sign,
    total_weight,
    UnresolvedWeightError,
)
from .index import (
    PASS,
    UNCERTIFIED,
    CoverData,
    FormalCurveComponent,
    auto_transversality,
    cover_index,
    ech_index_breakdown,
    fredholm_index_breakdown,
    index_inequality_check,
    l_positive_check,
    partition_check,
    self_intersection,
    super_rigidity_certificate,
)
from .io import (
    DocumentError,
    dumps,
    load,
    parse_curve_document,
    parse_manifold,
    parse_orbits,
    parse_profile,
    parse_weight_request,
)
from .oracle import AccuracyError, IntegrationError, linearized_return, measure_periods, period_convergence
from .perturb import (
    ConstraintError,
    ELLIPTIC,
    EPS_MAX,
    TechnicalConditionError,
    bourgeois_split,
    perturb_report,
    to_exact,
    twisted_catalog,
)
from .profile import (
    LAMBDA0,
    MorseBottSearchError,
    contact_certificate,
    exceptional_rotation,
    morse_bott_catalog,
)
from .surd import mod_one

THREADS_ENV = "ECH_S1S2_THREADS"


class UsageError(ValueError):
    pass


# helpers -----------------------------------------------------------------------------


def _positive(text: str) -> float:
    value = float(text)
    if not value > 0 or math.isinf(value):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _profile(args):
    return parse_profile(load(args.profile)) if args.profile else LAMBDA0


def _flatten(doc, prefix: str = ""):
    if isinstance(doc, dict):
        for key in sorted(doc):
            yield from _flatten(doc[key], f"{prefix}.{key}" if prefix else str(key))
    elif isinstance(doc, list) and doc and isinstance(doc[0], (dict, list)):
        for i, item in enumerate(doc):
            yield from _flatten(item, f"{prefix}[{i}]")
    else:
        yield prefix, doc


def _render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(doc)
    if "checks" in doc:
        return "".join(
            f"[{'PASS' if c['passed'] else 'FAIL'}] {c['number']:2d} {c['label']}\n" for c in doc["checks"]
        ) + f"overall: {'PASS' if doc['passed'] else 'FAIL'}\n"
    lines = []
    for key, value in _flatten(doc):
        lines.append(f"{key}: {value if isinstance(value, str) else json.dumps(value, sort_keys=True, default=str)}")
    return "\n".join(lines) + "\n"


def _orbit_csv(orbits) -> str:
    buf = _stdio.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["name", "kind", "action", "action_lo", "action_hi", "homology_class", "theta0", "rotation"])
    for o in orbits:
        rot = "" if o.rotation is None else f"{float(o.rotation):.12g}"
        theta = "" if o.theta0 is None else f"{o.theta0:.12g}"
        lo, hi = o.action_interval
        writer.writerow([o.name, o.kind, f"{float(o.action):.12g}", f"{float(lo):.12g}", f"{float(hi):.12g}",
                         o.homology_class, theta, rot])
    return buf.getvalue()


def _family_csv(families) -> str:
    buf = _stdio.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["theta0", "m", "n", "action", "homology_class"])
    for f in families:
        writer.writerow([f"{f.theta0:.12g}", f.m, f.n, f"{f.action:.12g}", f.homology_class])
    return buf.getvalue()


def _write_csv(path: str | None, text: str) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# commands ----------------------------------------------------------------------------


def cmd_orbits(args):
    profile = _profile(args)
    cert = contact_certificate(profile, args.grid)
    doc = {"profile": profile.to_json(), "contact": cert.to_json()}
    if not cert.passed:
        return doc, False
    cutoff = args.cutoff if args.cutoff is not None else 10.0
    cat = morse_bott_catalog(profile, cutoff, args.grid)
    doc["cutoff"] = cutoff
    doc["winding_bound"] = cat.winding_bound
    doc["families"] = [f.to_json() for f in cat.families]
    doc["exceptional"] = [exceptional_rotation(profile, p).to_json() for p in ("0", "pi")]
    _write_csv(args.csv, _family_csv(cat.families))
    return doc, True


def cmd_perturb(args):
    delta = args.delta if args.delta is not None else 1e-3
    cutoff = args.cutoff if args.cutoff is not None else 12.0
    if args.twisted:
        profile = _profile(args)
        cat = twisted_catalog(profile, cutoff, delta, args.grid)
        _write_csv(args.csv, _orbit_csv(cat.orbits))
        return {"catalog": cat.to_json()}, True
    if args.epsilon is None or args.rho is None:
        raise UsageError("perturb needs --rho and --epsilon (or --twisted)")
    if not 0 < to_exact(args.epsilon) <= EPS_MAX:
        raise UsageError("--epsilon must lie in (0, sqrt(3/2)]")
    rho = args.rho
    if not cutoff > rho:
        raise UsageError("--cutoff must exceed --rho")
    res = perturb_report(rho, args.epsilon, args.c, delta, cutoff, args.grid)
    doc = {
        "modifier": res.modifier.to_json(),
        "modifier_zero": res.modifier.is_zero(),
        "error": res.error,
        "neighborhood": None if res.neighborhood is None else res.neighborhood.to_json(),
        "catalog": None if res.catalog is None else res.catalog.to_json(),
    }
    if res.catalog is not None:
        _write_csv(args.csv, _orbit_csv(res.catalog.orbits))
    return doc, res.error is None


def cmd_verify(args):
    profile = _profile(args)
    cutoff = args.cutoff if args.cutoff is not None else 10.0
    tol = args.tolerance
    cat = morse_bott_catalog(profile, cutoff, args.grid)
    fams = [f for f in cat.families if math.sin(f.theta0) > 0.05]
    periods = measure_periods(profile, fams) if fams else []
    rows = []
    ok = True
    for f, p in zip(fams, periods):
        err = abs(p - f.action)
        ok &= err < tol
        rows.append({"theta0": f.theta0, "m": f.m, "n": f.n, "action": f.action, "error_below_tol": err < tol})
    poles = []
    for pole in ("0", "pi"):
        exact = exceptional_rotation(profile, pole)
        rep = linearized_return(profile, pole)
        target = float(mod_one(exact.rotation))
        d = abs(rep.rotation - target) % 1.0
        err = min(d, 1.0 - d)
        ok &= err < tol
        poles.append({"pole": pole, "exact": str(exact.rotation), "error_below_tol": err < tol})
    doc = {"cutoff": cutoff, "tolerance": tol, "families": rows, "poles": poles,
           "skipped_near_pole": len(cat.families) - len(fams)}
    if args.convergence and fams:
        change = period_convergence(profile, fams[0])
        doc["step_halving_below_tol"] = change < tol
        ok &= change < tol
    return doc, ok


def _builtin_curves():
    return {
        "orbits": [
            {"name": "e", "kind": ELLIPTIC, "action": "4", "rotation": "-1 + 1/2*sqrt6"},
            {"name": "n", "kind": "negative-hyperbolic", "action": "4"},
        ],
        "curves": [
            {"name": "special-plane", "kind": "special-plane", "c_tau": 1, "ends": [{"orbit": "e"}],
             "multiplicities": [1, 2, 3, 4, 5, 6]},
            {"name": "exceptional-sphere", "kind": "exceptional-sphere", "c_tau": 1, "q_tau": -1,
             "multiplicities": [1, 2, 3, 4, 5, 6]},
            {"name": "negative-hyperbolic-plane", "c_tau": 1, "ends": [{"orbit": "n"}],
             "multiplicities": [1, 2, 3, 4, 5, 6]},
        ],
    }


def _curve_source(args):
    doc = load(args.curves) if args.curves else _builtin_curves()
    _, curves, covers = parse_curve_document(doc)
    mults = {c.get("name", ""): c.get("multiplicities", [1]) for c in doc.get("curves", [])}
    return doc, curves, covers, mults


def cmd_index(args):
    doc, curves, covers, mults = _curve_source(args)
    rho = args.rho
    out = []
    for c in curves:
        row = {
            "name": c.name,
            "kind": c.kind,
            "ech_index": {str(d): ech_index_breakdown(c, int(d)).to_json() for d in mults.get(c.name, [1])},
            "fredholm_index": fredholm_index_breakdown(c).to_json(),
        }
        if rho is not None:
            row["self_intersection"] = str(self_intersection(c, rho))
        out.append(row)
    cov = [{"name": n, **cover_index(cv).to_json()} for n, cv in covers]
    return {"curves": out, "covers": cov}, True


def cmd_certify(args):
    doc, curves, covers, _ = _curve_source(args) if args.curves else (None, None, None, None)
    if curves is None:
        from .perturb import ReebOrbit

        orbit = ReebOrbit.model(ELLIPTIC, Fraction(1, 20), action=1.0, name="e")
        plane = FormalCurveComponent.special_plane(orbit)
        curves = [plane, FormalCurveComponent.special_torus()]
        covers = [(f"plane-d{d}", CoverData.plane_cover(plane, d, 0, [1] * d)) for d in (2, 3)]
        covers.append(("torus-d2-g1", CoverData.build(curves[1], 2, 1, ())))
        doc = {}
    cutoff = args.cutoff
    ok = True
    rows = []
    for c in curves:
        row = {"name": c.name, "kind": c.kind}
        if c.ends:
            row["index_inequality"] = index_inequality_check(c).to_json()
        row["auto_transversality"] = auto_transversality(c).to_json()
        if cutoff is not None:
            row["l_positive"] = {e.orbit.name: l_positive_check(e.orbit, cutoff) for e in c.ends}
            ok &= all(v is not False for v in row["l_positive"].values())
        status = row["auto_transversality"]["status"]
        ok &= status != "fail" and row.get("index_inequality", {}).get("status") != "fail"
        rows.append(row)
    cov_rows = []
    for name, cv in covers:
        cert = super_rigidity_certificate(cv)
        ok &= cert.status in (PASS, UNCERTIFIED, "not-applicable")
        cov_rows.append({"name": name, "super_rigidity": cert.to_json()})
    parts = []
    entries = (doc or {}).get("partitions", [])
    orbits = {o.name: o for o in parse_orbits(doc["orbits"])} if entries and "orbits" in doc else {}
    for p in entries:
        orbit = orbits.get(p.get("orbit"))
        if orbit is None:
            raise DocumentError(f"partition entry refers to unknown orbit {p.get('orbit')!r}")
        res = partition_check(orbit, int(p["total"]), [int(m) for m in p["multiplicities"]], bool(p.get("positive", False)))
        ok &= res is not False
        parts.append({"orbit": orbit.name, "result": "not-applicable" if res is None else res})
    return {"curves": rows, "covers": cov_rows, "partitions": parts}, ok


def _generator_source(args):
    cutoff = args.cutoff if args.cutoff is not None else 10.0
    if args.catalog:
        return parse_orbits(load(args.catalog)), cutoff
    delta = args.delta if args.delta is not None else 1e-3
    profile = _profile(args)
    if args.twisted:
        return twisted_catalog(profile, cutoff, delta, args.grid).orbits, cutoff
    return bourgeois_split(profile, cutoff, delta, args.grid).orbits, cutoff


def cmd_generators(args):
    orbits, cutoff = _generator_source(args)
    en = enumerate_with_borderline(orbits, args.gamma, Fraction(str(cutoff)), args.cap)
    doc = {"gamma": args.gamma, "cutoff": cutoff, **en.to_json()}
    if args.rho is not None:
        gated = rho_gate(en.generators, Fraction(str(args.rho)))
        doc["rho"] = args.rho
        doc["rho_gated"] = [g.to_json() for g in gated]
    return doc, True


def cmd_weights(args):
    if not args.curves:
        raise UsageError("weights needs a request document via --curves")
    req = load(args.curves)
    comps, hyp, loops = parse_weight_request(req)
    doc = {"epsilon": epsilon_sign(comps, hyp, loops)}
    try:
        doc["total_weight"] = total_weight(comps, hyp, loops)
    except UnresolvedWeightError as exc:
        doc["total_weight"] = None
        doc["unresolved"] = str(exc)
    if "ordering" in req:
        doc["tensor_sign"] = tensor_ordering_sign([int(i) for i in req["ordering"]], [int(p) for p in req["parities"]])
    return doc, "unresolved" not in doc


def cmd_manifold(args):
    if not args.curves:
        raise UsageError("manifold needs a summary document via --curves")
    raw = load(args.curves)
    summary = parse_manifold(raw)
    dims = {label: spin_c_dimension(summary, c1sq) for label, c1sq in sorted(summary.spin_c.items())}
    audit = parity_audit(summary, int(raw.get("index", 0)), raw.get("points_loops"))
    doc = {"summary": summary.to_json(), "spin_c_dimensions": dims, "parity_audit": audit.to_json()}
    if "e_dot_a" in raw:
        doc["gate"] = gate_check(raw["e_dot_a"])
    if "closed_case" in raw:
        d, i, agree = closed_case_check(summary, int(raw["closed_case"]["c1_dot_a"]), int(raw["closed_case"]["a_dot_a"]))
        doc["closed_case"] = {"dimension": d, "index": i, "agree": agree}
    return doc, audit.passed


def cmd_paper_checks(args):
    if args.only:
        bad = [n for n in args.only if not 1 <= n <= len(checks.ALL_CHECKS)]
        if bad:
            raise UsageError(f"no such check: {bad}")
    results = checks.run_checks(args.only)
    if args.plane_rotation is not None:
        results = [checks.check_plane_table(to_exact(args.plane_rotation)) if r.number == 3 else r for r in results]
    doc = {"checks": [r.to_json() for r in results], "passed": all(r.ok for r in results)}
    return doc, doc["passed"]


COMMANDS = {
    "orbits": cmd_orbits,
    "perturb": cmd_perturb,
    "verify": cmd_verify,
    "index": cmd_index,
    "certify": cmd_certify,
    "generators": cmd_generators,
    "weights": cmd_weights,
    "manifold": cmd_manifold,
    "paper-checks": cmd_paper_checks,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ech-s1s2",
        description="Reeb orbits, indices and generators for contact forms on S1 x S2.",
        epilog=f"Set {THREADS_ENV} to cap numerical library threads.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--profile", help="profile JSON document (default: the round form)")
    common.add_argument("--cutoff", type=_positive, help="action cutoff L")
    common.add_argument("--rho", type=_positive, help="flatness level rho(A)")
    common.add_argument("--epsilon", help="pole rotation target, e.g. 1/20 or sqrt(3/2)")
    common.add_argument("--c", help="modifier constant (default 1 + 2 delta)")
    common.add_argument("--delta", type=_positive, help="Bourgeois splitting width")
    common.add_argument("--gamma", type=int, default=0, help="homology class of generators")
    common.add_argument("--twisted", action="store_true", help="use the twisted boundary quotient")
    common.add_argument("--curves", help="input document (curves, weight request or manifold summary)")
    common.add_argument("--catalog", help="orbit list JSON for generator enumeration")
    common.add_argument("--grid", type=int, default=10_000, help="angle grid size")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("--csv", help="also write a CSV table of orbits or families")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "verify":
            p.add_argument("--tolerance", type=_positive, default=1e-6)
            p.add_argument("--convergence", action="store_true", help="also halve the step once")
        if name == "generators":
            p.add_argument("--cap", type=int, default=1_000_000, help="maximum number of generators")
        if name == "paper-checks":
            p.add_argument("--only", type=int, nargs="+", help="check numbers to run")
            p.add_argument("--plane-rotation", help="override the special plane rotation in check 3")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        doc, ok = COMMANDS[args.command](args)
    except (UsageError, DocumentError, OSError, ValueError, KeyError) as exc:
        if isinstance(exc, (ConstraintError, TechnicalConditionError)):
            doc, ok = {"error": str(exc)}, False
        else:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    except (IntegrationError, AccuracyError, MorseBottSearchError) as exc:
        doc, ok = {"error": str(exc)}, False
    text = _render(doc, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
