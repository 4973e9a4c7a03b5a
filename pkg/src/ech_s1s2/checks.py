"""The twelve acceptance checks, shared by the command line and the test suite.

Each check is deterministic: random inputs come from ``random.Random`` with the
fixed seeds below, so reports are byte-identical across runs.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .generators import (
    ManifoldSummary,
    WeightedComponent,
    enumerate_generators,
    epsilon_sign,
    parity_audit,
    tensor_ordering_sign,
)
from .index import (
    EXCEPTIONAL_SPHERE,
    GENERIC,
    PASS,
    UNCERTIFIED,
    CoverData,
    CurrentDecomposition,
    End,
    FormalCurveComponent,
    current_index_bound,
    cz,
    ech_index,
    fredholm_index,
    l_positive_check,
    super_rigidity_certificate,
)
from .oracle import linearized_return, measure_periods
from .perturb import (
    ELLIPTIC,
    NEG_HYP,
    POS_HYP,
    ReebOrbit,
    bourgeois_split,
    build_lambda_A,
    taubes_modifier,
    to_exact,
)
from .profile import (
    LAMBDA0,
    exceptional_rotation,
    morse_bott_catalog,
    technical_condition_check,
)
from .surd import QSqrt6, mod_one

ENUMERATION_SEED = 8
SIGN_SEED = 10
PARITY_SEED = 11
CURRENT_SEED = 12

TWO_PI = 2.0 * math.pi
POLE_ROTATION = QSqrt6(0, 1, 2)  # sqrt(3/2)
PLANE_ROTATION = QSqrt6(-2, 1, 2)  # sqrt(3/2) - 1
EQUATOR_SHEAR = TWO_PI * math.sqrt(6.0)
CONTRACTIBLE_ACTION = 4.0 * math.pi * math.sqrt(2.0) / 3.0


@dataclass
class CheckResult:
    number: int
    label: str
    passed: bool
    values: dict = field(default_factory=dict)
    budget: float | None = None
    elapsed: float = 0.0

    @property
    def within_budget(self) -> bool:
        return self.budget is None or self.elapsed < self.budget

    @property
    def ok(self) -> bool:
        return self.passed and self.within_budget

    def line(self) -> str:
        return f"[{'PASS' if self.ok else 'FAIL'}] {self.number:2d} {self.label}"

    def to_json(self) -> dict:
        # elapsed time is left out so reports stay byte-stable
        return {
            "number": self.number,
            "label": self.label,
            "passed": self.ok,
            "runtime_budget_s": self.budget,
            "within_budget": self.within_budget,
            "values": self.values,
        }


def _timed(number: int, label: str, budget: float | None, fn, *args, **kwargs) -> CheckResult:
    start = time.perf_counter()
    passed, values = fn(*args, **kwargs)
    return CheckResult(number, label, bool(passed), values, budget, time.perf_counter() - start)


def _circle_dist(x: float, y: float) -> float:
    d = abs(x - y) % 1.0
    return min(d, 1.0 - d)


# 1 ---------------------------------------------------------------------------------


def _exceptional_rotation(tol: float = 1e-5):
    target = mod_one(POLE_ROTATION)
    rows = {}
    ok = True
    for pole in ("0", "pi"):
        data = exceptional_rotation(LAMBDA0, pole)
        exact = mod_one(data.rotation) == target
        rep = linearized_return(LAMBDA0, pole)
        err = _circle_dist(rep.rotation, float(target))
        rows[pole] = {"exact": str(data.rotation), "exact_match": exact, "oracle_error_below_tol": err < tol}
        ok &= exact and err < tol
    return ok, {"target_mod_1": str(target), "poles": rows, "tolerance": tol}


def check_exceptional_rotation() -> CheckResult:
    return _timed(1, "exceptional orbit rotation of the round form is sqrt(3/2) mod 1", 5.0, _exceptional_rotation)


# 2 ---------------------------------------------------------------------------------


def _modifier_round_trip(cutoff: float = 10.0, grid_size: int = 10_000):
    rows = []
    ok = True
    for eps, c in ((Fraction(1, 10), 2), (Fraction(1, 4), 2), (POLE_ROTATION, 0)):
        modifier = taubes_modifier(eps, c)
        profile = LAMBDA0.rescaled(modifier)
        rots = [exceptional_rotation(profile, pole).rotation for pole in ("0", "pi")]
        if eps == POLE_ROTATION:
            exact = modifier.is_zero()
        else:
            exact = all(r == QSqrt6.coerce(eps) for r in rots)
        fams = morse_bott_catalog(profile, cutoff, grid_size).families
        tech = technical_condition_check(profile, fams)
        rows.append({
            "eps": str(eps),
            "c": c,
            "modifier_zero": modifier.is_zero(),
            "pole_rotations": [str(r) for r in rots],
            "exact_ok": exact,
            "families": len(fams),
            "technical_ok": tech.passed,
            "worst_margin": f"{tech.worst:.6e}",
        })
        ok &= exact and tech.passed
    return ok, {"cutoff": cutoff, "grid_size": grid_size, "profiles": rows}


def check_modifier_round_trip() -> CheckResult:
    return _timed(2, "modified form has pole rotation eps; eps = sqrt(3/2), c = 0 is unmodified", None, _modifier_round_trip)


# 3 ---------------------------------------------------------------------------------


def plane_index_table(rotation=PLANE_ROTATION, top: int = 6) -> list[int]:
    orbit = ReebOrbit.model(ELLIPTIC, to_exact(rotation) if isinstance(rotation, str) else rotation, name="e")
    plane = FormalCurveComponent.special_plane(orbit)
    return [ech_index(plane, d) for d in range(1, top + 1)]


def _plane_table(rotation=PLANE_ROTATION):
    table = plane_index_table(rotation)
    negative = [d for d, v in enumerate(table, 1) if v < 0]
    threshold = negative[0] if negative else None
    ok = table == [0, 0, 0, 0, -2, -4] and threshold == 5
    return ok, {"rotation": str(rotation), "table": table, "first_negative": threshold}


def check_plane_table(rotation=PLANE_ROTATION) -> CheckResult:
    return _timed(3, "multiply covered special plane index table, negative from d = 5", None, _plane_table, rotation)


# 4 ---------------------------------------------------------------------------------


def _sphere_and_hyperbolic_plane():
    sphere = FormalCurveComponent.exceptional_sphere()
    nh = ReebOrbit.model(NEG_HYP, name="n")
    plane = FormalCurveComponent(0, (End(nh, 1),), c_tau=1, q_tau=0, kind=GENERIC, name="plane")
    ds = range(1, 7)
    sph = [ech_index(sphere, d) for d in ds]
    pl = [ech_index(plane, d) for d in ds]
    ok = sph == [-d * (d - 1) for d in ds] and pl == [-d * (d - 1) // 2 for d in ds]
    return ok, {"sphere": sph, "negative_hyperbolic_plane": pl}


def check_sphere_index() -> CheckResult:
    return _timed(4, "exceptional sphere and negative hyperbolic plane cover indices", None, _sphere_and_hyperbolic_plane)


# 5 ---------------------------------------------------------------------------------


def _round_catalog(cutoff: float = 10.0, tol: float = 1e-6):
    cat = morse_bott_catalog(LAMBDA0, cutoff)
    equator = [f for f in cat.families if f.homology_class == 1 and abs(f.action - TWO_PI) < 1e-9]
    contractible = [f for f in cat.families if f.homology_class == 0 and abs(f.action - CONTRACTIBLE_ACTION) < 1e-9]
    targets = equator + contractible
    periods = measure_periods(LAMBDA0, targets) if targets else []
    closed = [TWO_PI] * len(equator) + [CONTRACTIBLE_ACTION] * len(contractible)
    errs = [abs(p - c) for p, c in zip(periods, closed)]
    ok = len(equator) == 1 and len(contractible) == 2 and all(e < tol for e in errs)
    return ok, {
        "cutoff": cutoff,
        "families": len(cat.families),
        "equator": len(equator),
        "contractible": len(contractible),
        "periods_within_tol": [e < tol for e in errs],
        "tolerance": tol,
    }


def check_round_catalog() -> CheckResult:
    return _timed(5, "round form orbit families below 10 with oracle periods", 30.0, _round_catalog)


# 6 ---------------------------------------------------------------------------------


def _equator_shear(tol: float = 1e-4):
    fams = morse_bott_catalog(LAMBDA0, 10.0).families
    eq = min(fams, key=lambda f: abs(f.theta0 - math.pi / 2))
    rep = linearized_return(LAMBDA0, eq)
    err = abs(rep.shear - EQUATOR_SHEAR) if rep.shear is not None else math.inf
    ok = rep.classification == "degenerate-shear" and abs(rep.determinant - 1.0) < tol and err < tol
    return ok, {
        "classification": rep.classification,
        "shear": f"{rep.shear:.6f}",
        "expected": f"{EQUATOR_SHEAR:.6f}",
        "within_tol": err < tol,
        "tolerance": tol,
    }


def check_equator_shear() -> CheckResult:
    return _timed(6, "equator linearized return map is a unit shear by 2 pi sqrt 6", None, _equator_shear)


# 7 ---------------------------------------------------------------------------------


def bourgeois_catalog_properties(catalog, grid_size: int = 10_000) -> dict:
    cutoff, delta = catalog.cutoff, catalog.delta
    elliptic_ok = all(l_positive_check(o, cutoff) for o in catalog.orbits if o.kind == ELLIPTIC)
    interval_ok = all(
        lo <= o.action <= hi and hi - lo <= delta * (1 + 1e-12)
        for o in catalog.orbits
        for lo, hi in [o.action_interval]
    )
    fams = [f for f in morse_bott_catalog(catalog.profile, cutoff, grid_size).families if f.action - delta < cutoff]
    missing = 0
    for f in fams:
        kinds = sorted(
            o.kind
            for o in catalog.orbits
            if not o.exceptional and o.theta0 is not None and abs(o.theta0 - f.theta0) < 1e-9
            and o.homology_class == f.homology_class
        )
        missing += kinds != [ELLIPTIC, POS_HYP]
    extra = sum(1 for o in catalog.orbits if not o.exceptional) - 2 * len(fams)
    poles = sum(1 for o in catalog.orbits if o.exceptional)
    return {
        "orbits": len(catalog.orbits),
        "families": len(fams),
        "elliptic_l_positive": elliptic_ok,
        "actions_in_intervals": interval_ok,
        "missing_families": missing,
        "extra_orbits": extra,
        "exceptional_orbits": poles,
        "ok": elliptic_ok and interval_ok and missing == 0 and extra == 0 and poles == 2,
    }


def _bourgeois_properties():
    rows = []
    for delta in (1e-2, 1e-3):
        cases = [("round", 10.0, bourgeois_split(LAMBDA0, 10.0, delta))]
        for rho, eps, cutoff in ((10.0, "1/20", 12.0), (6.0, "1/10", 8.0)):
            cat, _ = build_lambda_A(rho, eps, None, delta, cutoff)
            cases.append((f"eps={eps}", cutoff, cat))
        for name, cutoff, cat in cases:
            rows.append({"profile": name, "delta": delta, "cutoff": cutoff, **bourgeois_catalog_properties(cat)})
    return all(r["ok"] for r in rows), {"catalogs": rows}


def check_bourgeois_properties() -> CheckResult:
    return _timed(7, "split catalogs: L-positive elliptic orbits, actions in intervals, no missing family", None, _bourgeois_properties)


# 8 ---------------------------------------------------------------------------------


def brute_force_orbit_sets(orbits, homology_class: int, cutoff) -> set[tuple[tuple[str, int], ...]]:
    """Reference enumerator: every multiplicity vector up to the action bound,
    then admissibility, class and action filters."""
    L = Fraction(cutoff)
    ranges = []
    for o in orbits:
        lo = Fraction(o.action_interval[0])
        ranges.append(range(0, int(L / lo) + 2))
    out = set()
    for mults in itertools.product(*ranges):
        if any(m > 1 and o.kind != ELLIPTIC for o, m in zip(orbits, mults)):
            continue
        if sum(m * o.homology_class for o, m in zip(orbits, mults)) != homology_class:
            continue
        upper = sum((m * Fraction(o.action_interval[1]) for o, m in zip(orbits, mults)), Fraction(0))
        if upper < L:
            out.add(tuple(sorted((o.name, m) for o, m in zip(orbits, mults) if m)))
    return out


def random_catalog(rng: random.Random, max_orbits: int = 6) -> list[ReebOrbit]:
    orbits = []
    for i in range(rng.randint(1, max_orbits)):
        kind = rng.choice((ELLIPTIC, ELLIPTIC, POS_HYP, NEG_HYP))
        den = rng.choice((1, 2, 3, 4, 6))
        hi = Fraction(rng.randint(max(1, den // 2), 6 * den), den)
        lo = hi - Fraction(rng.randint(1, 10), 100) if rng.random() < 0.5 else hi
        rot = Fraction(rng.randint(1, 19), 20) if kind == ELLIPTIC else None
        orbits.append(ReebOrbit(f"o{i}", kind, (lo + hi) / 2, (lo, hi), rng.choice((-1, 0, 0, 1, 2)), rot))
    return orbits


def _enumeration_oracle(trials: int = 200, seed: int = ENUMERATION_SEED):
    rng = random.Random(seed)
    mismatches = 0
    total = 0
    for _ in range(trials):
        orbits = random_catalog(rng)
        gamma = rng.choice((-1, 0, 0, 1, 2))
        cutoff = Fraction(rng.randint(1, 32), 4)
        got = [g.pairs for g in enumerate_generators(orbits, gamma, cutoff)]
        want = brute_force_orbit_sets(orbits, gamma, cutoff)
        total += len(want)
        mismatches += len(got) != len(set(got)) or set(got) != want
    return mismatches == 0, {"trials": trials, "seed": seed, "generators": total, "mismatches": mismatches}


def check_enumeration_oracle() -> CheckResult:
    return _timed(8, "generator enumeration equals exhaustive search on random catalogs", 60.0, _enumeration_oracle)


# 9 ---------------------------------------------------------------------------------


def partitions(n: int, largest: int | None = None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in partitions(n - k, k):
            yield (k,) + rest


def _super_rigidity(max_degree: int = 10, max_genus: int = 5):
    covers = 0
    failures = 0
    for rot in (Fraction(1, 20), Fraction(1, 11)):
        plane = FormalCurveComponent.special_plane(ReebOrbit.model(ELLIPTIC, rot, name=f"e:{rot}"))
        for d in range(1, max_degree + 1):
            for g in range(max_genus + 1):
                for part in partitions(d):
                    cert = super_rigidity_certificate(CoverData.plane_cover(plane, d, g, part))
                    covers += 1
                    failures += cert.status != PASS or cert.margin != -2 * len(part)
    torus = FormalCurveComponent.special_torus()
    torus_status = set()
    for d in range(1, max_degree + 1):
        for g in range(1, max_genus + 1):
            torus_status.add(super_rigidity_certificate(CoverData.build(torus, d, g, ())).status)
    ok = failures == 0 and torus_status == {UNCERTIFIED}
    return ok, {"plane_covers": covers, "plane_failures": failures, "torus_status": sorted(torus_status)}


def check_super_rigidity() -> CheckResult:
    return _timed(9, "super-rigidity holds for special plane covers; special torus uncertified", None, _super_rigidity)


# 10 --------------------------------------------------------------------------------


def random_component_list(rng: random.Random, size: int) -> list[WeightedComponent]:
    comps = []
    for k in range(size):
        parity = rng.randint(0, 1)
        n_h = parity + 2 * rng.randint(0, 1)
        n_l = parity + 2 * rng.randint(0, 1)
        ind = parity + 2 * rng.randint(0, 2)
        comps.append(
            WeightedComponent(
                ind,
                tuple(f"h{k}.{j}" for j in range(n_h)),
                tuple(f"l{k}.{j}" for j in range(n_l)),
                name=f"c{k}",
            )
        )
    return comps


def koszul_reference(ordering, parities) -> int:
    """Bubble the ordering back to identity one adjacent swap at a time."""
    seq = list(ordering)
    sign = 1
    for i in range(len(seq)):
        for j in range(len(seq) - 1 - i):
            if seq[j] > seq[j + 1]:
                if parities[seq[j]] % 2 and parities[seq[j + 1]] % 2:
                    sign = -sign
                seq[j], seq[j + 1] = seq[j + 1], seq[j]
    return sign


def _sign_machinery(reorderings: int = 1000, seed: int = SIGN_SEED):
    rng = random.Random(seed)
    invariant_failures = 0
    for _ in range(reorderings):
        comps = random_component_list(rng, rng.randint(1, 6))
        hyp = [h for c in comps for h in c.hyperbolic_ends]
        loops = [l for c in comps for l in c.loops]
        rng.shuffle(hyp)
        rng.shuffle(loops)
        base = epsilon_sign(comps, hyp, loops)
        shuffled = comps[:]
        rng.shuffle(shuffled)
        invariant_failures += epsilon_sign(shuffled, hyp, loops) != base
    tensor_failures = 0
    cases = 0
    for n in range(1, 5):
        for par in itertools.product((0, 1), repeat=n):
            for perm in itertools.permutations(range(n)):
                cases += 1
                tensor_failures += tensor_ordering_sign(perm, par) != koszul_reference(perm, par)
            for i in range(n - 1):
                swap = list(range(n))
                swap[i], swap[i + 1] = swap[i + 1], swap[i]
                flips = tensor_ordering_sign(swap, par) == -1
                tensor_failures += flips != (par[i] == 1 and par[i + 1] == 1)
    ok = invariant_failures == 0 and tensor_failures == 0
    return ok, {
        "reorderings": reorderings,
        "seed": seed,
        "epsilon_failures": invariant_failures,
        "tensor_cases": cases,
        "tensor_failures": tensor_failures,
    }


def check_sign_machinery() -> CheckResult:
    return _timed(10, "epsilon sign is ordering independent; tensor sign is the Koszul sign", None, _sign_machinery)


# 11 --------------------------------------------------------------------------------


def _parity_audits(samples: int = 1_000_000, seed: int = PARITY_SEED):
    failures = []
    for b1, b2p, n in itertools.product(range(4), range(1, 4), range(6)):
        rep = parity_audit(ManifoldSummary(4, 0, b1, b2p, n_untwisted=n), 0)
        if rep.circles_ok != ((n - 1 + b1 - b2p) % 2 == 0):
            failures.append(("circles", b1, b2p, n))
    for i, p in itertools.product(range(-1, 8), range(-1, 8)):
        got = parity_audit(ManifoldSummary(4, 0, 0, 1, n_untwisted=0), i, p).points_loops_ok
        if got != (0 <= p <= i and (i - p) % 2 == 0):
            failures.append(("points", i, p))
    rng = random.Random(seed)
    pool = []
    for k in range(1000):
        if k % 4 == 0:
            rot = QSqrt6(rng.randint(-50, 50), rng.randint(-5, 5), rng.randint(1, 20))
        else:
            rot = Fraction(rng.randint(-200, 200), rng.randint(1, 97))
        pool.append(ReebOrbit.model(ELLIPTIC, rot, name=f"e{k}"))
    ph, nh = ReebOrbit.model(POS_HYP), ReebOrbit.model(NEG_HYP)
    bad = 0
    third = samples // 3
    for _ in range(samples - 2 * third):
        bad += cz(pool[rng.randrange(1000)], rng.randint(1, 60)) % 2 != 1
    for _ in range(third):
        bad += cz(ph, rng.randint(1, 60)) != 0
    for _ in range(third):
        m = rng.randint(1, 60)
        bad += cz(nh, m) != m
    ok = not failures and bad == 0
    return ok, {"audit_failures": len(failures), "cz_samples": samples, "cz_failures": bad, "seed": seed}


def check_parity_audits() -> CheckResult:
    return _timed(11, "untwisted circle parity, I - p parity and CZ parity audits", None, _parity_audits)


# 12 --------------------------------------------------------------------------------

_VIOLATIONS = ("delta", "cross", "exceptional", "multiple", "gate")
_FLAG = {
    "delta": "delta_zero",
    "cross": "cross_terms_zero",
    "exceptional": "exceptional_multiplicity_le_one",
    "multiple": "multiply_covered_only_if_special",
    "gate": "gate_e_dot_a_ge_minus_one",
}
_RHO = 10


def _generic_component(rng: random.Random, hyp: ReebOrbit, delta: int = 0, extra_c: int = 0) -> FormalCurveComponent:
    genus = rng.randint(0, 2)
    ends = tuple(End(hyp, 1) for _ in range(rng.randint(1, 3)))
    chi = 2 - 2 * genus - len(ends)
    # extra_c > 0 forces positive index, so a multiple cover is never special
    c_tau = max(0, math.ceil(chi / 2)) + rng.randint(0, 1) + extra_c
    ind = -chi + 2 * c_tau
    q_tau = ind + 2 * delta - c_tau + rng.randint(0, 2)
    return FormalCurveComponent(genus, ends, c_tau, q_tau, delta, GENERIC)


def synthetic_current(rng: random.Random, violation: str | None = None):
    """A decomposition with only the named defect; returns it with the index it would have at equality."""
    plane_orbit = ReebOrbit.model(ELLIPTIC, Fraction(1, 50), action=1.0, name="e")
    hyp = ReebOrbit.model(POS_HYP, name="h")
    comps = []
    for _ in range(rng.randint(1, 2)):
        comps.append((FormalCurveComponent.special_plane(plane_orbit), rng.randint(1, 4)))
    for _ in range(rng.randint(1, 2)):
        comps.append((_generic_component(rng, hyp), 1))
    n_exc = rng.randint(1, 2)
    excs = [(FormalCurveComponent(0, (), 1, -1, 0, EXCEPTIONAL_SPHERE), 1) for _ in range(n_exc)]
    e_dot_a = [rng.randint(-1, 2) for _ in range(n_exc)]
    cross = {(i, j): 0 for i in range(len(comps)) for j in range(i + 1, len(comps))}
    if violation == "delta":
        k = len(comps) - 1
        comps[k] = (_generic_component(rng, hyp, rng.randint(1, 2)), 1)
    elif violation == "cross":
        cross[(0, len(comps) - 1)] = rng.randint(1, 3)
    elif violation == "exceptional":
        excs[0] = (excs[0][0], rng.randint(2, 3))
    elif violation == "multiple":
        comps[-1] = (_generic_component(rng, hyp, extra_c=1), rng.randint(2, 3))
    elif violation == "gate":
        e_dot_a[0] = -rng.randint(2, 3)
    ee = {(i, j): 0 for i in range(n_exc) for j in range(i + 1, n_exc)}
    mixed = {(s, k): 0 for s in range(n_exc) for k in range(len(comps))}
    current = CurrentDecomposition(comps, excs, cross, ee, mixed, e_dot_a)
    target = sum(d * fredholm_index(c) for c, d in comps)
    return current, target


def _current_bound(samples: int = 100, seed: int = CURRENT_SEED):
    rng = random.Random(seed)
    equality_failures = 0
    for _ in range(samples):
        current, target = synthetic_current(rng)
        rep = current_index_bound(current, _RHO, target)
        structural = ("cross_terms_zero", "delta_zero", "exceptional_multiplicity_le_one")
        equality_failures += not (rep.attained and all(rep.diagnostics[k] for k in structural)
                                  and all(rep.diagnostics.values()))
    flag_failures = 0
    for i in range(samples):
        kind = _VIOLATIONS[i % len(_VIOLATIONS)]
        current, target = synthetic_current(rng, kind)
        rep = current_index_bound(current, _RHO, target)
        flag_failures += rep.diagnostics[_FLAG[kind]] is not False
        if kind in ("delta", "cross", "exceptional"):
            flag_failures += rep.attained is not False
    ok = equality_failures == 0 and flag_failures == 0
    return ok, {"samples": samples, "seed": seed, "equality_failures": equality_failures,
                "violation_flag_failures": flag_failures}


def check_current_bound() -> CheckResult:
    return _timed(12, "current index bound: equality forces the structural conclusions; violations flagged", None, _current_bound)


ALL_CHECKS = (
    check_exceptional_rotation,
    check_modifier_round_trip,
    check_plane_table,
    check_sphere_index,
    check_round_catalog,
    check_equator_shear,
    check_bourgeois_properties,
    check_enumeration_oracle,
    check_super_rigidity,
    check_sign_machinery,
    check_parity_audits,
    check_current_bound,
)


def run_checks(numbers=None) -> list[CheckResult]:
    chosen = ALL_CHECKS if not numbers else [ALL_CHECKS[n - 1] for n in numbers]
    return [fn() for fn in chosen]
