"""From Morse-Bott forms to a nondegenerate orbit catalog below an action cutoff."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Union

from .poly import Poly
from .profile import (
    LAMBDA0,
    ExceptionalOrbitData,
    FormProfile,
    MorseBottFamily,
    exceptional_rotation,
    morse_bott_catalog,
    technical_condition_check,
)
from .surd import SQRT6, QSqrt6

Exact = Union[int, Fraction, QSqrt6]
Rotation = Union[Fraction, QSqrt6, float]

ELLIPTIC = "elliptic"
POS_HYP = "positive-hyperbolic"
NEG_HYP = "negative-hyperbolic"
_KIND_TAG = {ELLIPTIC: "e", POS_HYP: "h", NEG_HYP: "n"}
_KIND_ORDER = {ELLIPTIC: 0, POS_HYP: 1, NEG_HYP: 2}

# largest admissible modifier parameter, sqrt(3/2) = sqrt6/2
EPS_MAX = SQRT6 / 2


class TechnicalConditionError(ValueError):
    pass


class ConstraintError(ValueError):
    def __init__(self, message: str, **info):
        super().__init__(message)
        self.info = info


def to_exact(x) -> Fraction | QSqrt6:
    """Exact value of a number; floats are taken at their binary value."""
    if isinstance(x, QSqrt6):
        return x
    if isinstance(x, str):
        q = QSqrt6.parse(x)
        return q.rational_part if q.is_rational() else q
    return Fraction(x)


def in_positive_window(rotation: Rotation, action, cutoff) -> bool:
    """``rotation mod 1`` lies in the open interval ``(0, action / cutoff)``."""
    rot = to_exact(rotation)
    rot = rot.frac() if isinstance(rot, QSqrt6) else rot - math.floor(rot)
    bound = to_exact(action) / to_exact(cutoff)
    return 0 < rot < bound


@dataclass(frozen=True)
class ReebOrbit:
    name: str
    kind: str
    action: float
    action_interval: tuple[float, float]
    homology_class: int
    rotation: Rotation | None = None
    theta0: float | None = None
    pole: str | None = None
    exceptional: bool = False
    l_flat: bool = False
    cutoff: float | None = None
    covers_half_period: bool = False

    def __post_init__(self):
        if self.kind not in _KIND_TAG:
            raise ValueError(f"unknown orbit kind {self.kind!r}")
        if (self.kind == ELLIPTIC) != (self.rotation is not None):
            raise ValueError("elliptic orbits carry a rotation and hyperbolic orbits do not")

    @classmethod
    def model(
        cls,
        kind: str,
        rotation: Rotation | None = None,
        action: float = 1.0,
        name: str | None = None,
        homology_class: int = 0,
        cutoff: float | None = None,
    ) -> ReebOrbit:
        """A free-standing orbit record for formal computations."""
        if name is None:
            name = f"{_KIND_TAG[kind]}:{rotation}" if rotation is not None else _KIND_TAG[kind]
        return cls(name, kind, action, (action, action), homology_class, rotation, cutoff=cutoff)

    @property
    def is_elliptic(self) -> bool:
        return self.kind == ELLIPTIC

    @property
    def l_positive(self) -> bool | None:
        if not self.is_elliptic or self.cutoff is None:
            return None
        return in_positive_window(self.rotation, self.action, self.cutoff)

    @property
    def upper_action(self) -> float:
        return self.action_interval[1]

    def to_json(self) -> dict:
        rot = self.rotation
        if isinstance(rot, QSqrt6):
            rot_doc = rot.to_json()
        elif isinstance(rot, Fraction):
            rot_doc = {"rational": str(rot), "sqrt6": "0", "float": float(rot)}
        else:
            rot_doc = rot
        return {
            "name": self.name,
            "kind": self.kind,
            "action": self.action,
            "action_interval": list(self.action_interval),
            "homology_class": self.homology_class,
            "rotation": rot_doc,
            "theta0": self.theta0,
            "pole": self.pole,
            "exceptional": self.exceptional,
            "l_flat": self.l_flat,
            "l_positive": self.l_positive,
            "half_period": self.covers_half_period,
        }


@dataclass
class OrbitCatalog:
    profile: FormProfile
    cutoff: float
    boundary: str  # untwisted | twisted
    orbits: list[ReebOrbit]
    delta: float
    families: list[MorseBottFamily] = field(default_factory=list)
    winding_bound: int | None = None

    def __post_init__(self):
        if self.boundary not in ("untwisted", "twisted"):
            raise ValueError("boundary must be 'untwisted' or 'twisted'")

    def by_name(self, name: str) -> ReebOrbit:
        for orb in self.orbits:
            if orb.name == name:
                return orb
        raise KeyError(name)

    def exceptional(self) -> list[ReebOrbit]:
        return [o for o in self.orbits if o.exceptional]

    def below_cutoff(self) -> list[ReebOrbit]:
        return [o for o in self.orbits if o.upper_action < self.cutoff]

    def to_json(self) -> dict:
        return {
            "boundary": self.boundary,
            "cutoff": self.cutoff,
            "delta": self.delta,
            "winding_bound": self.winding_bound,
            "profile": self.profile.to_json(),
            "families": [f.to_json() for f in self.families],
            "orbits": [o.to_json() for o in self.orbits],
        }


def taubes_modifier(eps, c=0) -> Poly:
    """Exponent ``-((3 - sqrt6 eps)/2) u^2 - c``; both pole rotations become ``eps``."""
    e = QSqrt6.coerce(to_exact(eps))
    cc = QSqrt6.coerce(to_exact(c))
    if not (0 < e <= EPS_MAX):
        raise ValueError(f"eps must lie in (0, sqrt(3/2)], got {e}")
    if cc < 0:
        raise ValueError("c must be nonnegative")
    return Poly.of([-cc, 0, -(3 - SQRT6 * e) / 2])


def _label(theta0: float | None, pole: str | None) -> str:
    return f"pole{pole}" if pole is not None else f"{theta0:.9f}"


def _finalize(orbits: list[ReebOrbit]) -> list[ReebOrbit]:
    """Order by (angle, kind) and attach stable names."""

    def key(o: ReebOrbit):
        angle = o.theta0 if o.theta0 is not None else (0.0 if o.pole == "0" else math.pi)
        return (angle, _KIND_ORDER[o.kind], o.action)

    out = []
    for i, o in enumerate(sorted(orbits, key=key)):
        name = f"{_KIND_TAG[o.kind]}@{_label(o.theta0, o.pole)}#{i}"
        out.append(replace(o, name=name))
    return out


def _split_rotation(nominal: float, cutoff: float) -> Fraction:
    # any value in (0, nominal/cutoff) is admissible; this one is deterministic
    return Fraction(nominal) / (2 * Fraction(cutoff))


def _exceptional_orbit(data: ExceptionalOrbitData, homology_class: int, cutoff: float) -> ReebOrbit:
    return ReebOrbit(
        name="",
        kind=ELLIPTIC,
        action=data.action,
        action_interval=(data.action, data.action),
        homology_class=homology_class,
        rotation=data.rotation,
        pole=data.pole,
        exceptional=True,
        cutoff=cutoff,
    )


def _checked_families(profile: FormProfile, cutoff: float, grid_size: int):
    mb = morse_bott_catalog(profile, cutoff, grid_size)
    tech = technical_condition_check(profile, mb.families)
    for theta0, value in tech.margins:
        if value >= 0:
            raise TechnicalConditionError(f"technical condition fails at theta0={theta0:.12g} (a' x a'' = {value:.6g})")
    return mb


def _split_family(fam: MorseBottFamily, cutoff: float, delta: float, homology_class: int) -> list[ReebOrbit]:
    lo, hi = fam.action - delta, fam.action
    nominal = fam.action - delta / 2
    common = dict(action=nominal, action_interval=(lo, hi), homology_class=homology_class, theta0=fam.theta0, cutoff=cutoff)
    return [
        ReebOrbit(name="", kind=POS_HYP, **common),
        ReebOrbit(name="", kind=ELLIPTIC, rotation=_split_rotation(nominal, cutoff), **common),
    ]


def bourgeois_split(profile: FormProfile, cutoff: float, delta: float, grid_size: int = 10_000) -> OrbitCatalog:
    """Each Morse-Bott torus below the cutoff becomes one positive hyperbolic and
    one elliptic orbit with action in ``[A - delta, A]``; the pole orbits stay."""
    if cutoff <= 0 or delta <= 0:
        raise ValueError("cutoff and delta must be positive")
    mb = _checked_families(profile, cutoff, grid_size)
    orbits: list[ReebOrbit] = []
    for fam in mb.families:
        if fam.action - delta <= 0:
            raise ValueError("delta exceeds a family action")
        orbits.extend(_split_family(fam, cutoff, delta, fam.homology_class))
    for pole in ("0", "pi"):
        # the pole orbits run along +dt
        orbits.append(_exceptional_orbit(exceptional_rotation(profile, pole), -1, cutoff))
    return OrbitCatalog(profile, float(cutoff), "untwisted", _finalize(orbits), float(delta), mb.families, mb.winding_bound)


@dataclass(frozen=True)
class NeighborhoodSpec:
    eps: QSqrt6
    c: Fraction | QSqrt6
    kappa: int
    max_f: float
    min_f: float

    def to_json(self) -> dict:
        return {
            "eps": self.eps.to_json(),
            "c": str(self.c),
            "kappa": self.kappa,
            "max_F": self.max_f,
            "min_F": self.min_f,
        }


def neighborhood_spec(eps, c, delta: float) -> NeighborhoodSpec:
    """``F`` is the modifier plus the Bourgeois bump, so ``max F <= -c + delta`` and
    ``min F >= -(3 - sqrt6 eps)/2 - c - delta``; needs ``max F < -1``."""
    e = QSqrt6.coerce(to_exact(eps))
    cc = to_exact(c)
    k = float((3 - SQRT6 * e) / 2)
    max_f = -float(cc) + delta
    min_f = -k - float(cc) - delta
    if not max_f < -1.0:
        raise ConstraintError(
            f"max F = {max_f:.6g} is not below -1; need c > {1.0 + delta:.6g}",
            max_f=max_f,
            min_c=1.0 + delta,
        )
    return NeighborhoodSpec(e, cc, math.ceil(-min_f), max_f, min_f)


def auto_c(delta: float) -> Fraction:
    """``1 + 2 delta``: clears ``-c + delta < -1`` while keeping the pole
    actions, and hence the admissible ``eps`` range, as large as possible."""
    return 1 + 2 * Fraction(str(delta))


def max_admissible_eps(c, cutoff: float) -> float:
    """Supremum of ``eps`` in ``(0, sqrt(3/2)]`` with ``eps < 2 pi a1(pole) / cutoff``."""
    cf = float(to_exact(c))
    top = float(EPS_MAX)

    def slack(e: float) -> float:
        return 4.0 * math.pi * math.exp(-(3.0 - math.sqrt(6.0) * e) / 2.0 - cf) / cutoff - e

    grid = [top * k / 4096 for k in range(1, 4097)]
    good = [e for e in grid if slack(e) > 0]
    if not good:
        lo, hi = 0.0, grid[0]
    elif good[-1] == top:
        return top
    else:
        lo, hi = good[-1], good[-1] + top / 4096
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if slack(mid) > 0 else (lo, mid)
    return lo


@dataclass
class PerturbationResult:
    modifier: Poly
    profile: FormProfile
    catalog: OrbitCatalog | None
    neighborhood: NeighborhoodSpec | None
    error: str | None = None


def _flag_flat(catalog: OrbitCatalog, rho: float) -> OrbitCatalog:
    catalog.orbits = [replace(o, l_flat=o.upper_action < rho) for o in catalog.orbits]
    return catalog


def build_lambda_A(rho: float, eps, c=None, delta: float = 1e-3, cutoff: float = 12.0, grid_size: int = 10_000):
    """Modified, split and flattened catalog plus its neighbourhood data.

    ``c=None`` picks ``auto_c(delta)``;
    an explicit ``c`` that violates it raises ``ConstraintError``.
    """
    if not cutoff > rho:
        raise ValueError("cutoff must exceed rho")
    cc = auto_c(delta) if c is None else to_exact(c)
    modifier = taubes_modifier(eps, cc)
    profile = LAMBDA0.rescaled(modifier)
    e = QSqrt6.coerce(to_exact(eps))
    for pole in ("0", "pi"):
        data = exceptional_rotation(profile, pole)
        if not in_positive_window(data.rotation, data.action, cutoff):
            raise ConstraintError(
                f"eps={float(e):.6g} is not cutoff-positive at pole {pole}; maximal admissible eps is "
                f"{max_admissible_eps(cc, cutoff):.9g}",
                max_eps=max_admissible_eps(cc, cutoff),
            )
    spec = neighborhood_spec(e, cc, delta)
    catalog = _flag_flat(bourgeois_split(profile, cutoff, delta, grid_size), rho)
    return catalog, spec


def perturb_report(rho: float, eps, c=None, delta: float = 1e-3, cutoff: float = 12.0, grid_size: int = 10_000) -> PerturbationResult:
    """Like ``build_lambda_A`` but returns the modifier and catalog even when the
    neighbourhood constraint fails, with the failure recorded."""
    cc = auto_c(delta) if c is None else to_exact(c)
    modifier = taubes_modifier(eps, cc)
    profile = LAMBDA0.rescaled(modifier)
    try:
        catalog, spec = build_lambda_A(rho, eps, cc, delta, cutoff, grid_size)
        return PerturbationResult(modifier, profile, catalog, spec)
    except ConstraintError as exc:
        catalog = None
        try:
            catalog = _flag_flat(bourgeois_split(profile, cutoff, delta, grid_size), rho)
        except (TechnicalConditionError, ValueError):
            pass
        return PerturbationResult(modifier, profile, catalog, None, str(exc))


def twisted_catalog(profile: FormProfile, cutoff: float, delta: float, grid_size: int = 10_000) -> OrbitCatalog:
    """Orbits of the quotient by ``(t, theta, phi) -> (t + pi, pi - theta, -phi)``.

    Homology classes are in units of the quotient circle ``t mod pi`` with the
    ``-dt`` orientation, so a full turn of the original ``t`` counts twice.
    """
    if isinstance(profile, OrbitCatalog):
        raise TypeError("twisted_catalog takes a profile; untwisted catalogs come from bourgeois_split")
    if not isinstance(profile, FormProfile):
        raise TypeError("profile must be a FormProfile")
    if not profile.is_sigma_invariant():
        raise ValueError("profile is not invariant under the involution")
    if cutoff <= 0 or delta <= 0:
        raise ValueError("cutoff and delta must be positive")
    mb = _checked_families(profile, cutoff, grid_size)
    orbits: list[ReebOrbit] = []
    for fam in mb.families:
        if abs(fam.theta0 - math.pi / 2) < 1e-9:
            # Klein bottle: the two invariant orbits close up at half period
            lo, hi = fam.action - delta, fam.action
            half = (fam.action - delta / 2) / 2
            for _ in range(2):
                orbits.append(
                    ReebOrbit(
                        name="",
                        kind=NEG_HYP,
                        action=half,
                        action_interval=(lo / 2, hi / 2),
                        homology_class=-fam.m,
                        theta0=fam.theta0,
                        cutoff=cutoff,
                        covers_half_period=True,
                    )
                )
            nominal = fam.action - delta / 2
            orbits.append(
                ReebOrbit(
                    name="",
                    kind=ELLIPTIC,
                    action=nominal,
                    action_interval=(lo, hi),
                    homology_class=-2 * fam.m,
                    rotation=_split_rotation(nominal, cutoff),
                    theta0=fam.theta0,
                    cutoff=cutoff,
                )
            )
        elif fam.theta0 < math.pi / 2:
            # the partner at pi - theta0 is the same torus downstairs
            orbits.extend(_split_family(fam, cutoff, delta, -2 * fam.m))
    data = exceptional_rotation(profile, "0")
    orbits.append(_exceptional_orbit(data, -2, cutoff))
    orbits = _finalize(orbits)
    return OrbitCatalog(profile, float(cutoff), "twisted", orbits, float(delta), mb.families, mb.winding_bound)
