"""Orbit-set generators, gradings, weights and signs, closed-manifold bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .index import EXCEPTIONAL_SPHERE, GENERIC, SPECIAL_PLANE, SPECIAL_TORUS
from .perturb import ELLIPTIC, POS_HYP, OrbitCatalog, ReebOrbit, to_exact

PROCEED = "proceed"
VANISH = "vanish"


class GeneratorCapError(RuntimeError):
    pass


class UnresolvedWeightError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class OrbitSetGenerator:
    # field order doubles as the canonical sort key
    upper_action: Fraction
    pairs: tuple[tuple[str, int], ...]
    lower_action: Fraction = field(compare=False)
    homology_class: int = field(compare=False)
    parity: int = field(compare=False)

    @property
    def is_empty(self) -> bool:
        return not self.pairs

    def to_json(self) -> dict:
        return {
            "pairs": [[n, m] for n, m in self.pairs],
            "action": [float(self.lower_action), float(self.upper_action)],
            "homology_class": self.homology_class,
            "parity": self.parity,
        }


def _orbits_of(source) -> list[ReebOrbit]:
    return list(source.orbits) if isinstance(source, OrbitCatalog) else list(source)


def _bounds(orbit: ReebOrbit) -> tuple[Fraction, Fraction]:
    lo, hi = (to_exact(x) for x in orbit.action_interval)
    if lo <= 0:
        raise ValueError(f"orbit {orbit.name} has nonpositive action")
    return lo, hi


def _make(chosen: list[tuple[ReebOrbit, int]]) -> OrbitSetGenerator:
    lo = sum((_bounds(o)[0] * m for o, m in chosen), Fraction(0))
    hi = sum((_bounds(o)[1] * m for o, m in chosen), Fraction(0))
    cls = sum(o.homology_class * m for o, m in chosen)
    parity = sum(1 for o, _ in chosen if o.kind == POS_HYP) % 2
    pairs = tuple(sorted((o.name, m) for o, m in chosen))
    return OrbitSetGenerator(hi, pairs, lo, cls, parity)


@dataclass
class Enumeration:
    generators: list[OrbitSetGenerator]
    borderline: list[OrbitSetGenerator]

    def to_json(self) -> dict:
        return {
            "generators": [g.to_json() for g in self.generators],
            "borderline": [g.to_json() for g in self.borderline],
            "dimensions": parity_counts(self.generators),
        }


def enumerate_with_borderline(source, homology_class: int, cutoff, cap: int = 1_000_000) -> Enumeration:
    """Depth-first search over orbits sorted by action.

    A generator is kept when its upper action is below the cutoff; one whose
    lower action is below but upper is not goes to the borderline list.
    """
    orbits = sorted(_orbits_of(source), key=lambda o: (_bounds(o)[1], o.name))
    names = [o.name for o in orbits]
    if len(set(names)) != len(names):
        raise ValueError("orbit names must be unique")
    L = to_exact(cutoff)
    lows = [_bounds(o)[0] for o in orbits]
    n = len(orbits)

    # suffix class-gain bounds per unit of remaining action budget
    hyp_up = [0] * (n + 1)
    hyp_dn = [0] * (n + 1)
    ell_up = [Fraction(0)] * (n + 1)
    ell_dn = [Fraction(0)] * (n + 1)
    for i in range(n - 1, -1, -1):
        o, c = orbits[i], orbits[i].homology_class
        hyp_up[i], hyp_dn[i], ell_up[i], ell_dn[i] = hyp_up[i + 1], hyp_dn[i + 1], ell_up[i + 1], ell_dn[i + 1]
        if o.kind == ELLIPTIC:
            ell_up[i] = max(ell_up[i], Fraction(c) / lows[i])
            ell_dn[i] = min(ell_dn[i], Fraction(c) / lows[i])
        else:
            hyp_up[i] += max(c, 0)
            hyp_dn[i] += min(c, 0)

    kept: list[OrbitSetGenerator] = []
    border: list[OrbitSetGenerator] = []
    chosen: list[tuple[ReebOrbit, int]] = []

    def visit(i: int, spent: Fraction, cls: int) -> None:
        budget = L - spent
        need = homology_class - cls
        if not (hyp_dn[i] + ell_dn[i] * budget <= need <= hyp_up[i] + ell_up[i] * budget):
            return
        if i == n:
            g = _make(chosen)
            (kept if g.upper_action < L else border).append(g)
            if len(kept) + len(border) > cap:
                raise GeneratorCapError(f"more than {cap} generators")
            return
        o = orbits[i]
        visit(i + 1, spent, cls)
        top = 1 if o.kind != ELLIPTIC else None
        m = 1
        while (top is None or m <= top) and spent + m * lows[i] < L:
            chosen.append((o, m))
            visit(i + 1, spent + m * lows[i], cls + m * o.homology_class)
            chosen.pop()
            m += 1

    visit(0, Fraction(0), 0)
    return Enumeration(sorted(kept), sorted(border))


def enumerate_generators(source, homology_class: int, cutoff, cap: int = 1_000_000) -> list[OrbitSetGenerator]:
    """Admissible orbit sets of the given class with action below the cutoff."""
    return enumerate_with_borderline(source, homology_class, cutoff, cap).generators


def grading_parity(gen: OrbitSetGenerator) -> int:
    return gen.parity


def parity_counts(gens: Iterable[OrbitSetGenerator]) -> dict[int, int]:
    counts = {0: 0, 1: 0}
    for g in gens:
        counts[g.parity] += 1
    return counts


def filtered_dimensions(source, homology_class: int, cutoff) -> dict[int, int]:
    """Number of generators in each parity."""
    return parity_counts(enumerate_generators(source, homology_class, cutoff))


def rho_gate(gens: Iterable[OrbitSetGenerator], rho) -> list[OrbitSetGenerator]:
    """Generators with action at most rho."""
    r = to_exact(rho)
    return [g for g in gens if g.upper_action <= r]


# signs and weights ------------------------------------------------------------


@dataclass(frozen=True)
class WeightedComponent:
    index: int
    hyperbolic_ends: tuple[str, ...] = ()
    loops: tuple[str, ...] = ()
    kind: str = GENERIC
    multiplicity: int = 1
    weight: int | None = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "hyperbolic_ends", tuple(self.hyperbolic_ends))
        object.__setattr__(self, "loops", tuple(self.loops))


def permutation_sign(perm: Sequence[int]) -> int:
    """Sign of a permutation of ``range(len(perm))`` via cycle counting."""
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _induced_sign(sequence: Sequence[str], reference: Sequence[str], what: str) -> int:
    if sorted(sequence) != sorted(reference) or len(set(reference)) != len(reference):
        raise ValueError(f"components' {what} do not match the reference ordering")
    pos = {name: i for i, name in enumerate(reference)}
    return permutation_sign([pos[s] for s in sequence])


def check_parity_consistency(components: Sequence[WeightedComponent]) -> None:
    for c in components:
        if not (len(c.hyperbolic_ends) % 2 == len(c.loops) % 2 == c.index % 2):
            raise ValueError(f"component {c.name or c.index} has inconsistent end, loop and index parities")


def epsilon_sign(components: Sequence[WeightedComponent], hyperbolic_order: Sequence[str], loop_order: Sequence[str]) -> int:
    """Product of the signs of the orderings the component list induces on
    the positive hyperbolic orbits and on the loops."""
    check_parity_consistency(components)
    ends = [h for c in components for h in c.hyperbolic_ends]
    loops = [l for c in components for l in c.loops]
    return _induced_sign(ends, hyperbolic_order, "hyperbolic ends") * _induced_sign(loops, loop_order, "loops")


def resolve_weight(c: WeightedComponent) -> int:
    """Weights proven to be 1 default; everything else must be supplied."""
    if c.weight is not None:
        return c.weight
    if c.kind in (EXCEPTIONAL_SPHERE, SPECIAL_PLANE):
        return 1
    if c.kind == SPECIAL_TORUS and c.multiplicity > 1:
        raise UnresolvedWeightError(f"multiply covered torus {c.name or c.index} needs an external weight")
    raise UnresolvedWeightError(f"component {c.name or c.index} of kind {c.kind} needs an external weight")


def total_weight(components: Sequence[WeightedComponent], hyperbolic_order: Sequence[str], loop_order: Sequence[str]) -> int:
    prod = 1
    for c in components:
        prod *= resolve_weight(c)
    return epsilon_sign(components, hyperbolic_order, loop_order) * prod


def tensor_ordering_sign(ordering: Sequence[int], parities: Sequence[int]) -> int:
    """Koszul sign of reordering graded factors: each inverted pair of odd factors flips it."""
    if sorted(ordering) != list(range(len(parities))):
        raise ValueError("ordering must be a permutation of the component indices")
    sign = 1
    for a in range(len(ordering)):
        for b in range(a + 1, len(ordering)):
            i, j = ordering[a], ordering[b]
            if i > j and parities[i] % 2 and parities[j] % 2:
                sign = -sign
    return sign


# closed-manifold bookkeeping --------------------------------------------------


@dataclass
class ManifoldSummary:
    chi: int
    sigma: int
    b1: int
    b2_plus: int
    n_untwisted: int = 0
    n_twisted: int = 0
    spin_c: dict[str, int] = field(default_factory=dict)  # label -> c1(s)^2

    def __post_init__(self):
        if self.b1 < 0 or self.b2_plus < 1 or self.n_untwisted < 0 or self.n_twisted < 0:
            raise ValueError("need b1 >= 0, b2+ >= 1 and nonnegative circle counts")

    def to_json(self) -> dict:
        return {
            "chi": self.chi,
            "sigma": self.sigma,
            "b1": self.b1,
            "b2_plus": self.b2_plus,
            "n_untwisted": self.n_untwisted,
            "n_twisted": self.n_twisted,
            "spin_c": dict(sorted(self.spin_c.items())),
        }


def spin_c_dimension(summary: ManifoldSummary, c1_squared: int) -> int:
    """``(c1^2 - 2 chi - 3 sigma) / 4``."""
    num = c1_squared - 2 * summary.chi - 3 * summary.sigma
    if num % 4:
        raise ValueError(f"c1^2 = {c1_squared} is not congruent to 2 chi + 3 sigma mod 4")
    return num // 4


def closed_case_index(c1_dot_a: int, a_dot_a: int) -> int:
    return c1_dot_a + a_dot_a


def closed_case_check(summary: ManifoldSummary, c1_dot_a: int, a_dot_a: int) -> tuple[int, int, bool]:
    """With ``c1(s) = c1(TX) + 2A`` the closed-case index equals the spin-c dimension."""
    c1_sq = 2 * summary.chi + 3 * summary.sigma + 4 * (c1_dot_a + a_dot_a)
    d = spin_c_dimension(summary, c1_sq)
    i = closed_case_index(c1_dot_a, a_dot_a)
    return d, i, d == i


def gate_check(e_dot_a: Iterable[int]) -> str:
    return VANISH if any(v < -1 for v in e_dot_a) else PROCEED


@dataclass
class ParityAudit:
    circles_ok: bool
    expected_parity: int
    points_loops_ok: bool | None
    grading_parity: int

    @property
    def passed(self) -> bool:
        return self.circles_ok and self.points_loops_ok is not False

    def to_json(self) -> dict:
        return {
            "untwisted_parity_ok": self.circles_ok,
            "expected_parity": self.expected_parity,
            "index_minus_loops_even": self.points_loops_ok,
            "grading_parity": self.grading_parity,
            "passed": self.passed,
        }


def parity_audit(summary: ManifoldSummary, index: int, loops: int | None = None) -> ParityAudit:
    """Untwisted circle count versus ``1 - b1 + b2+``, and ``I - p`` even with ``0 <= p <= I``."""
    expected = (1 - summary.b1 + summary.b2_plus) % 2
    ok = summary.n_untwisted % 2 == expected
    pl = None if loops is None else (0 <= loops <= index and (index - loops) % 2 == 0)
    return ParityAudit(ok, expected, pl, index % 2)
