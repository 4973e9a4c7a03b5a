"""S^1-invariant contact forms on S^1 x S^2 and their Morse-Bott Reeb dynamics.

A profile is ``lambda = a1(theta) dt + a2(theta) dphi`` with

    a_i(theta) = exp(P(u)) * Q_i(u),    u = cos(theta),

where ``Q_1, Q_2, P`` are polynomials in ``u`` with coefficients in Q(sqrt 6).
Taubes' form has ``Q_1 = 3u^2 - 1``, ``Q_2 = -sqrt6 (u - u^3)``, ``P = 0``.
Because ``d/dtheta = -sin(theta) d/du``, every quantity used below factors as a
power of ``sin(theta)`` times ``exp(kP)`` times a polynomial in ``u``:

    a_i'         = -s e^P D_i,            D_i = Q_i' + P' Q_i
    a_i''        = e^P (-u D_i + s^2 E_i), E_i = D_i' + P' D_i
    a x a'       = -s e^{2P} W,           W   = Q_1 Q_2' - Q_2 Q_1'
    a' x a''     = s^3 e^{2P} T,          T   = D_2 E_1 - D_1 E_2

so pole limits are plain polynomial evaluations at ``u = +-1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .poly import Poly, U
from .surd import QSqrt6, SQRT6

TWO_PI = 2.0 * math.pi

# c_1 of Taubes' contact structure in H^2(S^1 x S^2) = Z; stored, not computed
C1_XI0 = -2


class ProfileDomainError(ValueError):
    pass


class DegenerateProfileError(ValueError):
    pass


class MorseBottSearchError(RuntimeError):
    pass


def _pole_u(pole) -> int:
    if pole in (0, "0", 0.0):
        return 1
    if pole in ("pi", "π") or (isinstance(pole, float) and abs(pole - math.pi) < 1e-15):
        return -1
    raise ProfileDomainError(f"pole must be 0 or pi, got {pole!r}")


def pole_name(u: int) -> str:
    return "0" if u == 1 else "pi"


@dataclass(frozen=True)
class FormProfile:
    q1: Poly
    q2: Poly
    exponent: Poly = field(default_factory=Poly)
    base: str = "taubes"

    @classmethod
    def taubes(cls, exponent: Poly | None = None) -> FormProfile:
        q1 = Poly.of([-1, 0, 3])
        q2 = Poly.of([0, -SQRT6, 0, SQRT6])
        return cls(q1, q2, exponent if exponent is not None else Poly(), "taubes")

    @classmethod
    def custom(cls, q1: Sequence, q2: Sequence, exponent: Sequence = ()) -> FormProfile:
        return cls(Poly.of(q1), Poly.of(q2), Poly.of(exponent), "custom")

    def rescaled(self, exponent: Poly) -> FormProfile:
        """The profile of ``exp(f) * lambda`` for ``f = exponent(cos theta)``."""
        return FormProfile(self.q1, self.q2, self.exponent + exponent, self.base)

    # reduced polynomials ----------------------------------------------
    @cached_property
    def dexp(self) -> Poly:
        return self.exponent.deriv()

    @cached_property
    def d1(self) -> Poly:
        return self.q1.deriv() + self.dexp * self.q1

    @cached_property
    def d2(self) -> Poly:
        return self.q2.deriv() + self.dexp * self.q2

    @cached_property
    def e1(self) -> Poly:
        return self.d1.deriv() + self.dexp * self.d1

    @cached_property
    def e2(self) -> Poly:
        return self.d2.deriv() + self.dexp * self.d2

    @cached_property
    def wronskian(self) -> Poly:
        return self.q1 * self.q2.deriv() - self.q2 * self.q1.deriv()

    @cached_property
    def technical(self) -> Poly:
        return self.d2 * self.e1 - self.d1 * self.e2

    # float evaluation -------------------------------------------------
    def _u(self, theta):
        theta = np.asarray(theta, dtype=float)
        if np.any(theta < 0.0) or np.any(theta > math.pi):
            raise ProfileDomainError("theta must lie in [0, pi]")
        return np.cos(theta), np.sin(theta)

    def conformal_factor(self, theta):
        u, _ = self._u(theta)
        return np.exp(self.exponent.evalf(u))

    def coefficients(self, theta):
        """``(a1, a2)`` at ``theta`` (scalar or array)."""
        u, _ = self._u(theta)
        ef = np.exp(self.exponent.evalf(u))
        return ef * self.q1.evalf(u), ef * self.q2.evalf(u)

    def first_derivatives(self, theta):
        u, s = self._u(theta)
        ef = np.exp(self.exponent.evalf(u))
        return -s * ef * self.d1.evalf(u), -s * ef * self.d2.evalf(u)

    def second_derivatives(self, theta):
        u, s = self._u(theta)
        ef = np.exp(self.exponent.evalf(u))
        s2 = s * s
        return (
            ef * (-u * self.d1.evalf(u) + s2 * self.e1.evalf(u)),
            ef * (-u * self.d2.evalf(u) + s2 * self.e2.evalf(u)),
        )

    def cross_over_sin(self, theta):
        """``(a x a')(theta) / sin(theta)``, including the pole limits."""
        u, _ = self._u(theta)
        return -np.exp(2.0 * self.exponent.evalf(u)) * self.wronskian.evalf(u)

    def cross(self, theta):
        u, s = self._u(theta)
        return -s * np.exp(2.0 * self.exponent.evalf(u)) * self.wronskian.evalf(u)

    def second_cross(self, theta):
        """``(a' x a'')(theta)``."""
        u, s = self._u(theta)
        return s**3 * np.exp(2.0 * self.exponent.evalf(u)) * self.technical.evalf(u)

    def shear_rate(self, theta):
        """``r = -(a' x a'') / (a x a')^2``."""
        u, s = self._u(theta)
        w = self.wronskian.evalf(u)
        return -s * self.technical.evalf(u) / (np.exp(2.0 * self.exponent.evalf(u)) * w * w)

    def winding_density(self, theta):
        """``|a'| / (2 pi |a x a'|)``; winding of a family is action times this."""
        u, _ = self._u(theta)
        d = np.hypot(self.d1.evalf(u), self.d2.evalf(u))
        return d / (TWO_PI * np.exp(self.exponent.evalf(u)) * np.abs(self.wronskian.evalf(u)))

    def is_sigma_invariant(self) -> bool:
        """Invariance under ``(t, theta, phi) -> (t + pi, pi - theta, -phi)``."""
        return self.q1.is_even() and self.q2.is_odd() and self.exponent.is_even()

    def to_json(self) -> dict:
        return {
            "base": self.base,
            "q1": self.q1.to_json(),
            "q2": self.q2.to_json(),
            "exponent": self.exponent.to_json(),
        }


LAMBDA0 = FormProfile.taubes()


def evaluate_profile(profile: FormProfile, theta: float) -> tuple[float, float]:
    a1, a2 = profile.coefficients(theta)
    return float(a1), float(a2)


@dataclass
class Certificate:
    passed: bool
    margin: float
    worst_theta: float
    message: str = ""
    details: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "margin": self.margin,
            "worst_theta": self.worst_theta,
            "message": self.message,
            "details": self.details,
        }


def contact_certificate(profile: FormProfile, grid_size: int = 10_000) -> Certificate:
    """Check ``(a x a')/sin(theta) < 0`` on a uniform interior grid plus both poles."""
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    interior = np.linspace(0.0, math.pi, grid_size + 2)[1:-1]
    thetas = np.concatenate(([0.0], interior, [math.pi]))
    values = profile.cross_over_sin(thetas)
    k = int(np.argmax(values))
    margin = float(values[k])
    passed = bool(np.all(values < 0.0))
    msg = "contact" if passed else f"contact condition fails at theta={thetas[k]:.12g} (value {margin:.6g})"
    return Certificate(passed, margin, float(thetas[k]), msg)


@dataclass(frozen=True)
class ReebVector:
    dt: float
    dphi: float


def reeb_field(profile: FormProfile, theta: float) -> ReebVector:
    """Reeb vector ``(a2', -a1') / (a x a')`` for ``0 < theta < pi``."""
    if theta <= 0.0 or theta >= math.pi:
        raise ProfileDomainError("interior formula is undefined at the poles; use pole_reeb_field")
    u = math.cos(theta)
    ef = math.exp(float(profile.exponent.evalf(u)))
    w = float(profile.wronskian.evalf(u))
    return ReebVector(float(profile.d2.evalf(u)) / (ef * w), -float(profile.d1.evalf(u)) / (ef * w))


def pole_reeb_field(profile: FormProfile, pole) -> ReebVector:
    """At a pole the Reeb field is ``(1/a1) dt``."""
    u = _pole_u(pole)
    a1 = math.exp(float(profile.exponent.evalf(u))) * float(profile.q1.evalf(u))
    return ReebVector(1.0 / a1, 0.0)


@dataclass(frozen=True)
class MorseBottFamily:
    theta0: float
    m: int  # t-winding
    n: int  # phi-winding
    action: float

    @property
    def homology_class(self) -> int:
        # S^1 is oriented by -dt
        return -self.m

    @property
    def contractible(self) -> bool:
        return self.m == 0

    @property
    def slope(self) -> Fraction | None:
        """``a1'/a2'`` at the family angle, ``None`` for infinite slope."""
        # m a1' + n a2' = 0  =>  a1'/a2' = -n/m
        return None if self.m == 0 else Fraction(-self.n, self.m)

    def to_json(self) -> dict:
        return {
            "theta0": self.theta0,
            "winding": [self.m, self.n],
            "action": self.action,
            "homology_class": self.homology_class,
            "contractible": self.contractible,
        }


@dataclass
class MorseBottCatalog:
    families: list[MorseBottFamily]
    cutoff: float
    winding_bound: int
    grid_size: int
    bound_is_heuristic: bool = True

    def to_json(self) -> dict:
        return {
            "cutoff": self.cutoff,
            "winding_bound": self.winding_bound,
            "winding_bound_heuristic": self.bound_is_heuristic,
            "grid_size": self.grid_size,
            "families": [f.to_json() for f in self.families],
        }


def winding_bound(profile: FormProfile, cutoff: float, grid_size: int = 10_000) -> int:
    thetas = np.linspace(0.0, math.pi, grid_size + 1)
    dens = profile.winding_density(thetas)
    if not np.all(np.isfinite(dens)):
        raise DegenerateProfileError("a x a' vanishes; profile is not contact")
    return max(1, math.ceil(cutoff * float(np.max(dens))))


def _primitive_directions(bound: int):
    """One primitive (m, n) per line through the origin, max(|m|,|n|) <= bound."""
    yield (1, 0)
    for n in range(1, bound + 1):
        for m in range(-bound, bound + 1):
            if math.gcd(m, n) == 1:
                yield (m, n)


def _bisect(fun, lo: float, hi: float, tol: float, m: int, n: int) -> float:
    flo = fun(lo)
    if flo == 0.0:
        return lo
    for _ in range(200):
        if hi - lo < tol:
            return 0.5 * (lo + hi)
        mid = 0.5 * (lo + hi)
        fmid = fun(mid)
        if fmid == 0.0:
            return mid
        if (fmid < 0.0) == (flo < 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
    raise MorseBottSearchError(f"bisection did not converge for slope {-n}/{m} on [{lo}, {hi}]")


def morse_bott_catalog(
    profile: FormProfile,
    cutoff: float,
    grid_size: int = 10_000,
    max_winding: int | None = None,
) -> MorseBottCatalog:
    """Every Morse-Bott torus T(theta0) whose orbits have action below ``cutoff``.

    Tori sit where ``a1'/a2'`` is rational; for each primitive winding
    ``(m, n)`` we look for sign changes of ``m D_1 + n D_2`` on a theta grid.
    Completeness holds up to the winding bound, which is reported.
    """
    if cutoff <= 0:
        raise ValueError("cutoff must be positive")
    cert = contact_certificate(profile, grid_size)
    if not cert.passed:
        raise DegenerateProfileError(cert.message)
    bound = max_winding if max_winding is not None else winding_bound(profile, cutoff, grid_size)

    thetas = np.linspace(0.0, math.pi, grid_size + 1)
    u = np.cos(thetas)
    d1 = profile.d1.evalf(u)
    d2 = profile.d2.evalf(u)
    d1c, d2c = profile.d1.float_coeffs()[::-1], profile.d2.float_coeffs()[::-1]

    found: dict[tuple[int, int], list[float]] = {}
    families: list[MorseBottFamily] = []
    for m, n in _primitive_directions(bound):
        vals = m * d1 + n * d2
        idx = np.nonzero(np.signbit(vals[:-1]) != np.signbit(vals[1:]))[0]
        exact_zero = np.nonzero(vals == 0.0)[0]
        if idx.size == 0 and exact_zero.size == 0:
            continue

        def fun(th, m=m, n=n):
            c = math.cos(th)
            return m * float(np.polyval(d1c, c)) + n * float(np.polyval(d2c, c)) if d1c.size and d2c.size else (
                m * float(np.polyval(d1c, c)) if d1c.size else n * float(np.polyval(d2c, c))
            )

        roots = [_bisect(fun, thetas[k], thetas[k + 1], 1e-12, m, n) for k in idx]
        roots.extend(float(thetas[k]) for k in exact_zero)
        for th in sorted(roots):
            if th < 1e-9 or th > math.pi - 1e-9:
                continue
            if any(abs(th - prev) < 1e-9 for prev in found.get((m, n), [])):
                continue
            found.setdefault((m, n), []).append(th)
            a1, a2 = evaluate_profile(profile, th)
            action = TWO_PI * (m * a1 + n * a2)
            mm, nn = (m, n) if action > 0 else (-m, -n)
            action = abs(action)
            if action < cutoff:
                families.append(MorseBottFamily(th, mm, nn, action))
    families.sort(key=lambda f: (f.theta0, f.m, f.n))
    return MorseBottCatalog(families, float(cutoff), bound, grid_size)


@dataclass(frozen=True)
class ExceptionalOrbitData:
    pole: str
    action: float
    rotation: QSqrt6  # class in (0, 1)
    rotation_lift: QSqrt6  # value of the closed form before reduction

    def to_json(self) -> dict:
        return {
            "pole": self.pole,
            "action": self.action,
            "rotation": self.rotation.to_json(),
            "rotation_lift": self.rotation_lift.to_json(),
        }


def exceptional_rotation(profile: FormProfile, pole) -> ExceptionalOrbitData:
    """Action and exact rotation class of the elliptic orbit at a pole.

    The rotation class is ``sign(lim -a2'/(sin cos)) * a1'/a2'`` at the pole,
    i.e. ``sign(u D_2(u)) * D_1(u)/D_2(u)`` at ``u = +-1``.
    """
    u = _pole_u(pole)
    a1 = math.exp(float(profile.exponent.evalf(u))) * float(profile.q1.evalf(u))
    if a1 <= 0:
        raise DegenerateProfileError(f"a1 must be positive at pole {pole_name(u)}")
    d1 = profile.d1(QSqrt6(u))
    d2 = profile.d2(QSqrt6(u))
    if d2 == 0:
        raise DegenerateProfileError(f"a2' / sin vanishes at pole {pole_name(u)}; rotation formula inapplicable")
    sign = (d2 * u).sign()
    lift = d1 / d2 * sign
    rot = lift.frac()
    if rot == 0:
        raise DegenerateProfileError(f"integral rotation at pole {pole_name(u)}: orbit is degenerate")
    return ExceptionalOrbitData(pole_name(u), TWO_PI * a1, rot, lift)


@dataclass
class TechnicalReport:
    passed: bool
    margins: list[tuple[float, float]]  # (theta0, a' x a'')
    worst: float

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "worst_margin": self.worst,
            "margins": [{"theta0": t, "value": v} for t, v in self.margins],
        }


def technical_condition_check(profile: FormProfile, families: Sequence[MorseBottFamily]) -> TechnicalReport:
    """``a' x a'' < 0`` at every family angle."""
    margins = [(f.theta0, float(profile.second_cross(f.theta0))) for f in families]
    worst = max((v for _, v in margins), default=-math.inf)
    return TechnicalReport(all(v < 0 for _, v in margins), margins, worst)
