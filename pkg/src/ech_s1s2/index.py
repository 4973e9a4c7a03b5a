"""Conley-Zehnder, ECH and Fredholm indices of formal curves, and the
certificates built on them.

Trivialisation conventions are fixed: a positive hyperbolic orbit has
``CZ = 0`` for every cover, a negative hyperbolic orbit ``CZ(m) = m`` and an
elliptic orbit with rotation ``theta`` has ``CZ(m) = 2 floor(m theta) + 1``.
Relative Chern numbers and self-intersections are inputs, never computed.
Certificates do not raise on violated hypotheses; they return
``not-applicable`` and name the hypothesis.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .perturb import ELLIPTIC, NEG_HYP, POS_HYP, ReebOrbit, in_positive_window, to_exact
from .surd import QSqrt6

PASS = "pass"
FAIL = "fail"
NOT_APPLICABLE = "not-applicable"
UNCERTIFIED = "uncertified"

GENERIC = "generic-embedded"
SPECIAL_PLANE = "special-plane"
SPECIAL_TORUS = "special-torus"
EXCEPTIONAL_SPHERE = "exceptional-sphere"
CYLINDER = "cylinder"
KINDS = (GENERIC, SPECIAL_PLANE, SPECIAL_TORUS, EXCEPTIONAL_SPHERE, CYLINDER)


class IncompleteInputError(ValueError):
    pass


@dataclass
class Certificate:
    status: str
    margin: int | Fraction | None = None
    reason: str = ""
    values: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_json(self) -> dict:
        margin = self.margin if self.margin is None or isinstance(self.margin, int) else str(self.margin)
        return {"status": self.status, "margin": margin, "reason": self.reason, **self.values}


# Conley-Zehnder -----------------------------------------------------------


def floor_multiple(rotation, m: int) -> int:
    """Exact ``floor(m * rotation)``; floats enter at their binary value."""
    rot = to_exact(rotation)
    if isinstance(rot, QSqrt6):
        return (rot * m).floor()
    return math.floor(rot * m)


def cz(orbit: ReebOrbit, m: int) -> int:
    if not isinstance(m, int) or m <= 0:
        raise ValueError(f"multiplicity must be a positive integer, got {m!r}")
    if orbit.kind == POS_HYP:
        return 0
    if orbit.kind == NEG_HYP:
        return m
    return 2 * floor_multiple(orbit.rotation, m) + 1


def cz_sum(orbit: ReebOrbit, total: int) -> int:
    """``sum_{k=1..total} CZ(orbit^k)``."""
    if total < 0:
        raise ValueError("total multiplicity must be nonnegative")
    if orbit.kind == POS_HYP:
        return 0
    if orbit.kind == NEG_HYP:
        return total * (total + 1) // 2
    return sum(2 * floor_multiple(orbit.rotation, k) + 1 for k in range(1, total + 1))


# formal curves ---------------------------------------------------------------


@dataclass(frozen=True)
class End:
    orbit: ReebOrbit
    multiplicity: int
    positive: bool = False  # ends in the completed cobordism are negative by default

    def __post_init__(self):
        if self.multiplicity < 1:
            raise ValueError("end multiplicity must be >= 1")


@dataclass(frozen=True)
class FormalCurveComponent:
    genus: int
    ends: tuple[End, ...] = ()
    c_tau: int = 0
    q_tau: int = 0
    delta: int = 0
    kind: str = GENERIC
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "ends", tuple(self.ends))
        if self.genus < 0 or self.delta < 0:
            raise ValueError("genus and singularity count must be nonnegative")
        if self.kind not in KINDS:
            raise ValueError(f"unknown curve kind {self.kind!r}")
        if self.kind == EXCEPTIONAL_SPHERE and (self.ends or self.genus or self.q_tau != -1):
            raise ValueError("an exceptional sphere is closed, of genus 0, with self-intersection -1")
        if self.kind == SPECIAL_PLANE:
            ok = (
                self.genus == 0
                and len(self.ends) == 1
                and not self.ends[0].positive
                and self.ends[0].orbit.kind == ELLIPTIC
                and self.ends[0].multiplicity == 1
            )
            if not ok:
                raise ValueError("a special plane has genus 0 and one simple negative end at an elliptic orbit")
        if self.kind == SPECIAL_TORUS and (self.genus != 1 or self.ends or self.c_tau or self.q_tau):
            raise ValueError("a special torus is closed, of genus 1, with c_tau = Q_tau = 0")

    @property
    def euler_characteristic(self) -> int:
        return 2 - 2 * self.genus - len(self.ends)

    @classmethod
    def special_plane(cls, orbit: ReebOrbit, name: str = "plane") -> FormalCurveComponent:
        return cls(0, (End(orbit, 1),), c_tau=1, q_tau=0, kind=SPECIAL_PLANE, name=name)

    @classmethod
    def exceptional_sphere(cls, name: str = "sphere") -> FormalCurveComponent:
        return cls(0, (), c_tau=1, q_tau=-1, kind=EXCEPTIONAL_SPHERE, name=name)

    @classmethod
    def special_torus(cls, name: str = "torus") -> FormalCurveComponent:
        return cls(1, (), kind=SPECIAL_TORUS, name=name)


def _grouped_ends(ends: Iterable[End], scale: int = 1) -> dict[tuple[str, bool], tuple[ReebOrbit, int]]:
    out: dict[tuple[str, bool], tuple[ReebOrbit, int]] = {}
    for e in ends:
        key = (e.orbit.name, e.positive)
        prev = out.get(key, (e.orbit, 0))[1]
        out[key] = (e.orbit, prev + scale * e.multiplicity)
    return out


@dataclass
class IndexBreakdown:
    value: int
    c_term: int
    q_term: int
    cz_term: int

    def to_json(self) -> dict:
        return {"value": self.value, "c_tau": self.c_term, "Q_tau": self.q_term, "CZ": self.cz_term}


def ech_index_breakdown(curve: FormalCurveComponent, d: int = 1) -> IndexBreakdown:
    """``I(dC) = d c + d^2 Q + CZ^I`` with ``CZ^I`` summed to total multiplicity
    at each orbit, positive ends minus negative ends."""
    if d < 1:
        raise ValueError("current multiplicity must be >= 1")
    total = 0
    for (_, positive), (orbit, mult) in _grouped_ends(curve.ends, d).items():
        s = cz_sum(orbit, mult)
        total += s if positive else -s
    c_term, q_term = d * curve.c_tau, d * d * curve.q_tau
    return IndexBreakdown(c_term + q_term + total, c_term, q_term, total)


def ech_index(curve: FormalCurveComponent, d: int = 1) -> int:
    return ech_index_breakdown(curve, d).value


def _cz_ind(ends: Iterable[End]) -> int:
    return sum(cz(e.orbit, e.multiplicity) * (1 if e.positive else -1) for e in ends)


def fredholm_index_breakdown(curve: FormalCurveComponent) -> IndexBreakdown:
    """``ind = -chi + 2 c + CZ^ind`` with CZ at each end's own multiplicity."""
    cz_term = _cz_ind(curve.ends)
    return IndexBreakdown(-curve.euler_characteristic + 2 * curve.c_tau + cz_term, 2 * curve.c_tau, 0, cz_term)


def fredholm_index(curve: FormalCurveComponent) -> int:
    return fredholm_index_breakdown(curve).value


def index_inequality_check(curve: FormalCurveComponent) -> Certificate:
    """``ind <= I - 2 delta``."""
    i, ind = ech_index(curve), fredholm_index(curve)
    slack = i - 2 * curve.delta - ind
    return Certificate(PASS if slack >= 0 else FAIL, slack, "" if slack >= 0 else "inconsistent formal data",
                       {"ech_index": i, "fredholm_index": ind})


def index_parity_validator(curve: FormalCurveComponent) -> Certificate:
    """``I - ind`` is even for genuine curves; on formal data this only checks inputs."""
    diff = ech_index(curve) - fredholm_index(curve)
    return Certificate(PASS if diff % 2 == 0 else FAIL, diff)


def self_intersection(curve: FormalCurveComponent, rho) -> Fraction:
    """``C.C = (2g - 2 + ind + h + 2 e_A + 4 delta) / 2`` where ``h`` counts ends
    at hyperbolic orbits and ``e_A`` is the multiplicity at rho-positive elliptic orbits."""
    h = sum(1 for e in curve.ends if e.orbit.kind != ELLIPTIC)
    e_a = sum(
        e.multiplicity
        for e in curve.ends
        if e.orbit.kind == ELLIPTIC and in_positive_window(e.orbit.rotation, e.orbit.action, rho)
    )
    return Fraction(2 * curve.genus - 2 + fredholm_index(curve) + h + 2 * e_a + 4 * curve.delta, 2)


# relative classes ----------------------------------------------------------------


@dataclass(frozen=True)
class RelativeClass:
    """Formal relative class: index data plus orbit sets at both ends."""

    c_tau: int
    q_tau: int
    positive: tuple[tuple[ReebOrbit, int], ...] = ()
    negative: tuple[tuple[ReebOrbit, int], ...] = ()

    def _ends(self, side) -> Counter:
        out: Counter = Counter()
        for orbit, m in side:
            out[orbit.name] += m
        return out

    def ech_index(self) -> int:
        orbits = {o.name: o for o, _ in self.positive + self.negative}
        plus = sum(cz_sum(orbits[n], m) for n, m in self._ends(self.positive).items())
        minus = sum(cz_sum(orbits[n], m) for n, m in self._ends(self.negative).items())
        return self.c_tau + self.q_tau + plus - minus

    def concatenate(self, lower: RelativeClass) -> RelativeClass:
        """Glue ``lower`` below ``self``; the middle orbit sets must agree."""
        if self._ends(self.negative) != lower._ends(lower.positive):
            raise ValueError("negative ends of the upper class do not match positive ends of the lower class")
        return RelativeClass(self.c_tau + lower.c_tau, self.q_tau + lower.q_tau, self.positive, lower.negative)


# covers ------------------------------------------------------------------------


@dataclass(frozen=True)
class CoverEnd:
    base_end: int  # index into base.ends
    multiplicity: int  # orbit multiplicity of the cover end


@dataclass(frozen=True)
class CoverData:
    """Connected branched cover of a formal curve."""

    base: FormalCurveComponent
    degree: int
    genus: int
    ends: tuple[CoverEnd, ...]
    branch_points: int

    @classmethod
    def build(cls, base: FormalCurveComponent, degree: int, genus: int, ends: Sequence[CoverEnd]) -> CoverData:
        """Fill in the branch-point count from Riemann-Hurwitz."""
        chi_cover = 2 - 2 * genus - len(ends)
        b = degree * base.euler_characteristic - chi_cover
        return cls(base, degree, genus, tuple(ends), b)

    @classmethod
    def plane_cover(cls, plane: FormalCurveComponent, degree: int, genus: int, partition: Sequence[int]) -> CoverData:
        m = plane.ends[0].multiplicity
        return cls.build(plane, degree, genus, [CoverEnd(0, m * k) for k in partition])

    def __post_init__(self):
        object.__setattr__(self, "ends", tuple(self.ends))
        if self.degree < 1 or self.genus < 0 or self.branch_points < 0:
            raise ValueError("degree >= 1, genus >= 0 and branch points >= 0 are required")
        chi_cover = 2 - 2 * self.genus - len(self.ends)
        if self.branch_points != self.degree * self.base.euler_characteristic - chi_cover:
            raise ValueError("branch points violate Riemann-Hurwitz")
        totals = Counter()
        for ce in self.ends:
            if not 0 <= ce.base_end < len(self.base.ends):
                raise ValueError("cover end refers to a missing base end")
            totals[ce.base_end] += ce.multiplicity
        for j, e in enumerate(self.base.ends):
            if totals[j] != self.degree * e.multiplicity:
                raise ValueError(f"cover ends over base end {j} do not total degree x multiplicity")
            for ce in self.ends:
                if ce.base_end == j and ce.multiplicity % e.multiplicity:
                    raise ValueError("cover end multiplicity must be a multiple of the base multiplicity")

    def cover_end_list(self) -> list[End]:
        return [
            End(self.base.ends[ce.base_end].orbit, ce.multiplicity, self.base.ends[ce.base_end].positive)
            for ce in self.ends
        ]

    @property
    def euler_characteristic(self) -> int:
        return 2 - 2 * self.genus - len(self.ends)


def _is_d_positive(orbit: ReebOrbit, d: int, m: int) -> bool:
    # CZ(orbit^k) = 1 for every k <= d m
    return orbit.kind == ELLIPTIC and floor_multiple(orbit.rotation, d * m) == 0


def _cover_fredholm(cover: CoverData) -> int:
    return -cover.euler_characteristic + 2 * cover.degree * cover.base.c_tau + _cz_ind(cover.cover_end_list())


@dataclass
class CoverIndexReport:
    index: int
    branch_points: int
    certificate: Certificate
    identity_value: int | None = None

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "branch_points": self.branch_points,
            "identity_value": self.identity_value,
            "certificate": self.certificate.to_json(),
        }


def cover_index(cover: CoverData) -> CoverIndexReport:
    """Fredholm index of the cover, certified ``>= b`` when every base end is at
    a positive hyperbolic or degree-positive elliptic orbit."""
    ind = _cover_fredholm(cover)
    base = cover.base
    bad = [
        e.orbit.name
        for e in base.ends
        if not (e.orbit.kind == POS_HYP or _is_d_positive(e.orbit, cover.degree, e.multiplicity))
    ]
    if bad:
        cert = Certificate(NOT_APPLICABLE, None, f"ends not at positive hyperbolic or degree-positive elliptic orbits: {bad}")
        return CoverIndexReport(ind, cover.branch_points, cert)
    # ind(C~) = d ind(C) + b + (d e - e~) with e counting elliptic ends, signed by end side
    sign = {True: -1, False: 1}
    de = sum(sign[e.positive] * cover.degree for e in base.ends if e.orbit.kind == ELLIPTIC)
    e_tilde = sum(sign[e.positive] for e in cover.cover_end_list() if e.orbit.kind == ELLIPTIC)
    identity = cover.degree * fredholm_index(base) + cover.branch_points + (de - e_tilde)
    margin = ind - cover.branch_points
    cert = Certificate(PASS if margin >= 0 else FAIL, margin, values={"identity_agrees": identity == ind})
    return CoverIndexReport(ind, cover.branch_points, cert, identity)


def pullback_operator_index(cover: CoverData) -> int:
    return _cover_fredholm(cover) - 2 * cover.branch_points


def _h_plus(ends: Iterable[End]) -> int:
    # negative hyperbolic ends count when their multiplicity is even
    return sum(
        1 for e in ends if e.orbit.kind == POS_HYP or (e.orbit.kind == NEG_HYP and e.multiplicity % 2 == 0)
    )


def auto_transversality(curve: FormalCurveComponent) -> Certificate:
    """Surjectivity criterion ``2g - 2 + h_+ < ind``."""
    lhs = 2 * curve.genus - 2 + _h_plus(curve.ends)
    ind = fredholm_index(curve)
    margin = lhs - ind
    if margin < 0:
        return Certificate(PASS, margin, values={"lhs": lhs, "index": ind})
    return Certificate(UNCERTIFIED, margin, "criterion gives no conclusion", {"lhs": lhs, "index": ind})


def super_rigidity_certificate(cover: CoverData) -> Certificate:
    """Injectivity criterion ``2g~ - 2 + h~_+ + ind(C~) - 2b < 0`` for a cover."""
    ends = cover.cover_end_list()
    bad = [f"{e.orbit.name}^{e.multiplicity}" for e in ends if e.orbit.kind == ELLIPTIC and cz(e.orbit, e.multiplicity) != 1]
    if bad:
        return Certificate(NOT_APPLICABLE, None, f"cover ends with CZ != 1: {bad}")
    ind = _cover_fredholm(cover)
    margin = 2 * cover.genus - 2 + _h_plus(ends) + ind - 2 * cover.branch_points
    values = {"cover_index": ind, "branch_points": cover.branch_points, "cover_ends": len(ends)}
    if margin < 0:
        return Certificate(PASS, margin, values=values)
    return Certificate(UNCERTIFIED, margin, "criterion gives no conclusion", values)


# orbit-level predicates ----------------------------------------------------------


def l_positive_check(orbit: ReebOrbit, cutoff) -> bool | None:
    """``None`` for hyperbolic orbits, where the notion does not apply."""
    if orbit.kind != ELLIPTIC:
        return None
    return in_positive_window(orbit.rotation, orbit.action, cutoff)


@dataclass
class WindowReport:
    last_multiplicity: int
    required: int | None
    meets_requirement: bool | None

    def to_json(self) -> dict:
        return {"last_multiplicity": self.last_multiplicity, "required": self.required, "meets": self.meets_requirement}


def cz_one_window(orbit: ReebOrbit, cutoff=None) -> WindowReport:
    """Largest ``m*`` with ``CZ(orbit^m) = 1`` for all ``m <= m*``."""
    if orbit.kind != ELLIPTIC:
        raise ValueError("the window is defined for elliptic orbits")
    rot = to_exact(orbit.rotation)
    rot = rot.frac() if isinstance(rot, QSqrt6) else rot - math.floor(rot)
    if rot == 0:
        raise ValueError("rotation must be nonzero mod 1")
    inv = 1 / rot
    fl = inv.floor() if isinstance(inv, QSqrt6) else math.floor(inv)
    m_star = fl - 1 if inv == fl else fl
    if cz(orbit, m_star) != 1 or cz(orbit, m_star + 1) == 1:
        raise AssertionError("window boundary disagrees with exact CZ")
    required = meets = None
    if cutoff is not None:
        ratio = to_exact(cutoff) / to_exact(orbit.action)
        ceil = -((-ratio).floor()) if isinstance(ratio, QSqrt6) else math.ceil(ratio)
        required = ceil - 1
        meets = m_star >= required
    return WindowReport(m_star, required, meets)


def partition_check(orbit: ReebOrbit, total: int, multiplicities: Sequence[int], positive_side: bool) -> bool | None:
    """Incoming partition ``(1,...,1)`` and outgoing ``(total)`` when ``total * theta < 1``;
    ``None`` outside that range."""
    if orbit.kind != ELLIPTIC or total < 1:
        return None
    if floor_multiple(orbit.rotation, total) != 0 or floor_multiple(orbit.rotation, 1) != 0:
        return None
    expected = [1] * total if positive_side else [total]
    return sorted(multiplicities) == expected


# current decompositions ----------------------------------------------------------


def _pair(table: dict, i: int, j: int, what: str) -> int:
    if (i, j) in table:
        v = table[(i, j)]
        if (j, i) in table and table[(j, i)] != v:
            raise ValueError(f"{what} table is not symmetric at {(i, j)}")
        return v
    if (j, i) in table:
        return table[(j, i)]
    raise IncompleteInputError(f"missing {what} entry for pair {(i, j)}")


@dataclass
class CurrentDecomposition:
    components: list[tuple[FormalCurveComponent, int]]
    exceptional: list[tuple[FormalCurveComponent, int]] = field(default_factory=list)
    curve_pairs: dict = field(default_factory=dict)  # (k, k') -> C_k . C_k'
    exceptional_pairs: dict = field(default_factory=dict)  # (s, s') -> E_s . E_s'
    mixed_pairs: dict = field(default_factory=dict)  # (s, k) -> E_s . C_k
    e_dot_a: list[int] = field(default_factory=list)

    def __post_init__(self):
        for _, d in self.components + self.exceptional:
            if d < 1:
                raise ValueError("multiplicities must be positive")


@dataclass
class BoundReport:
    full_rhs: int | Fraction
    bound: int
    attained: bool | None
    diagnostics: dict

    def to_json(self) -> dict:
        return {
            "full_rhs": str(self.full_rhs) if isinstance(self.full_rhs, Fraction) else self.full_rhs,
            "bound": self.bound,
            "attained": self.attained,
            "diagnostics": self.diagnostics,
        }


def current_index_bound(current: CurrentDecomposition, rho, target: int | None = None) -> BoundReport:
    """Lower bounds for the ECH index of a current and the structural
    conclusions that hold when the simplified bound is attained."""
    comps, excs = current.components, current.exceptional
    nk, ns = len(comps), len(excs)
    cross = {(i, j): _pair(current.curve_pairs, i, j, "curve intersection") for i in range(nk) for j in range(nk) if i != j}
    ee = {(i, j): _pair(current.exceptional_pairs, i, j, "exceptional intersection") for i in range(ns) for j in range(ns) if i != j}
    ec = {}
    for s in range(ns):
        for k in range(nk):
            if (s, k) not in current.mixed_pairs:
                raise IncompleteInputError(f"missing exceptional-curve entry for pair {(s, k)}")
            ec[(s, k)] = current.mixed_pairs[(s, k)]
    if len(current.e_dot_a) != ns:
        raise IncompleteInputError("one E.A value per exceptional component is required")

    selfint = [self_intersection(c, rho) for c, _ in comps]
    full = (
        sum(d * ech_index(c) for c, d in comps)
        + sum(d * (d - 1) * si for (c, d), si in zip(comps, selfint))
        - sum(m * (m - 1) for _, m in excs)
        + sum(comps[i][1] * comps[j][1] * v for (i, j), v in cross.items())
        + sum(excs[i][1] * excs[j][1] * v for (i, j), v in ee.items())
        + 2 * sum(excs[s][1] * comps[k][1] * v for (s, k), v in ec.items())
    )
    bound = (
        sum(d * fredholm_index(c) for c, d in comps)
        + 2 * sum(d * d * c.delta for c, d in comps)
        + sum(m * (m - 1) for _, m in excs)
        + sum(comps[i][1] * comps[j][1] * v for (i, j), v in cross.items())
    )
    multiply_ok = all(
        d == 1 or (si == 0 and fredholm_index(c) == 0) for (c, d), si in zip(comps, selfint)
    )
    diagnostics = {
        "cross_terms_zero": all(v == 0 for v in cross.values()),
        "delta_zero": all(c.delta == 0 for c, _ in comps),
        "exceptional_multiplicity_le_one": all(m <= 1 for _, m in excs),
        "multiply_covered_only_if_special": multiply_ok,
        "gate_e_dot_a_ge_minus_one": all(v >= -1 for v in current.e_dot_a),
        "index_inequality": all(index_inequality_check(c).passed for c, _ in comps),
        "no_negative_index": all(fredholm_index(c) >= 0 for c, _ in comps),
    }
    attained = None if target is None else target == bound
    return BoundReport(full, bound, attained, diagnostics)
