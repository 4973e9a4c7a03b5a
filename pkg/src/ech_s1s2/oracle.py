"""Numerical Reeb-flow oracle.

Nothing here uses the closed-form derivative polynomials of ``FormProfile``.
The Reeb field is rebuilt from finite differences of the form's components:
in any chart with ``lambda = A_i dq^i`` the kernel of ``d lambda`` is spanned
by ``curl A`` and ``R = curl A / (A . curl A)``.  The flow and its variational
equation are integrated with fixed-step RK4.

Charts: spherical ``q = (t, theta, phi)`` and, near a pole, Cartesian
``q = (t, x, y)`` with ``(x, y) = sin(theta) (cos phi, sin phi)`` where
``lambda = a1 dt + beta (x dy - y dx)``, ``beta = a2 / sin^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .poly import Poly
from .profile import FormProfile, MorseBottFamily, _pole_u, pole_name

TWO_PI = 2.0 * math.pi
CHART_SWITCH = 0.05
DEFAULT_STEPS = 2**14
# the variational system costs 13x a plain step; its default is coarser
VARIATIONAL_STEPS = 2**11
_FD_STEP = 1e-3
_STENCIL = np.array([-2.0, -1.0, 1.0, 2.0])
_WEIGHTS = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0


class IntegrationError(RuntimeError):
    def __init__(self, message: str, last_state: FlowState | None = None):
        super().__init__(message)
        self.last_state = last_state


class NonClosureError(RuntimeError):
    pass


class AccuracyError(RuntimeError):
    pass


@dataclass(frozen=True)
class FlowState:
    t: float
    theta: float
    phi: float

    @property
    def in_pole_chart(self) -> bool:
        return math.sin(self.theta) < CHART_SWITCH

    @property
    def cartesian(self) -> tuple[float, float]:
        s = math.sin(self.theta)
        return s * math.cos(self.phi), s * math.sin(self.phi)


def _fold(theta):
    # coefficients are functions of cos(theta): even about 0 and about pi
    theta = np.abs(theta)
    return np.where(theta > math.pi, 2.0 * math.pi - theta, theta)


def _offsets() -> np.ndarray:
    offs = np.zeros((3, 4, 3))
    for i in range(3):
        offs[i, :, i] = _STENCIL * _FD_STEP
    return offs.reshape(12, 3)


_OFFS = _offsets()
# _DIFF @ (values at the 12 offsets) = gradient, one row per coordinate
_DIFF = np.kron(np.eye(3), _WEIGHTS[None, :]) / _FD_STEP


def _coeff_matrix(*polys: Poly) -> np.ndarray:
    """Rows of coefficients, highest degree first, padded to a common degree."""
    width = max(1, max(len(p.coeffs) for p in polys))
    out = np.zeros((len(polys), width))
    for i, p in enumerate(polys):
        c = p.float_coeffs()
        out[i, width - len(c):] = c[::-1]
    return out


class _Chart:
    """Form components ``A(q)`` in one coordinate chart, vectorised over rows."""

    def __init__(self, profile: FormProfile, pole_u: int | None):
        self.profile = profile
        self.pole_u = pole_u
        polys = [profile.exponent, profile.q1, profile.q2]
        if pole_u is not None:
            quot, rem = profile.q2.divmod(Poly.of([1, 0, -1]))
            if not rem.is_zero():
                raise IntegrationError("a2 does not vanish to second order at the poles; no smooth pole chart")
            polys[2] = quot
        self._coeffs = _coeff_matrix(*polys)

    def _eval(self, u: np.ndarray) -> np.ndarray:
        out = np.multiply.outer(self._coeffs[:, 0], np.ones_like(u))
        for j in range(1, self._coeffs.shape[1]):
            out *= u
            out += self._coeffs[:, j, None]
        return out

    def components(self, q: np.ndarray) -> np.ndarray:
        out = np.empty_like(q)
        if self.pole_u is None:
            vals = self._eval(np.cos(q[:, 1]))
            ef = np.exp(vals[0])
            out[:, 0] = ef * vals[1]
            out[:, 1] = 0.0
            out[:, 2] = ef * vals[2]
            return out
        x, y = q[:, 1], q[:, 2]
        r2 = x * x + y * y
        if np.any(r2 >= 1.0):
            raise IntegrationError("left the pole chart")
        vals = self._eval(self.pole_u * np.sqrt(1.0 - r2))
        ef = np.exp(vals[0])
        beta = ef * vals[2]
        out[:, 0] = ef * vals[1]
        out[:, 1] = -beta * y
        out[:, 2] = beta * x
        return out

    def curl(self, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """``(A, curl A)`` at each row of ``q``."""
        k = q.shape[0]
        pts = (q[:, None, :] + _OFFS[None]).reshape(-1, 3)
        vals = self.components(np.concatenate([q, pts]))
        centre = vals[:k]
        # grad[k, i, j] = d A_j / d q_i
        grad = _DIFF @ vals[k:].reshape(k, 12, 3)
        curl = np.empty((k, 3))
        curl[:, 0] = grad[:, 1, 2] - grad[:, 2, 1]
        curl[:, 1] = grad[:, 2, 0] - grad[:, 0, 2]
        curl[:, 2] = grad[:, 0, 1] - grad[:, 1, 0]
        return centre, curl

    def reeb(self, q: np.ndarray) -> np.ndarray:
        a, c = self.curl(q)
        return c / (a * c).sum(axis=1)[:, None]

    def reeb_and_jacobian(self, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """``R(q)`` and ``J[i, j] = d R_i / d q_j`` at a single point."""
        vals = self.reeb(np.concatenate([q[None], q[None] + _OFFS]))
        return vals[0], (_DIFF @ vals[1:]).T

    def reeb_jacobian(self, q: np.ndarray) -> np.ndarray:
        return self.reeb_and_jacobian(q)[1]

    def to_chart(self, state: FlowState) -> np.ndarray:
        if self.pole_u is None:
            return np.array([state.t, state.theta, state.phi])
        x, y = state.cartesian
        return np.array([state.t, x, y])

    def from_chart(self, q: np.ndarray) -> FlowState:
        if self.pole_u is None:
            return FlowState(float(q[0]), float(q[1]), float(q[2]))
        s = math.hypot(q[1], q[2])
        theta = math.asin(min(s, 1.0)) if self.pole_u == 1 else math.pi - math.asin(min(s, 1.0))
        return FlowState(float(q[0]), theta, math.atan2(q[2], q[1]))


def _chart_for(profile: FormProfile, state: FlowState) -> _Chart:
    if not state.in_pole_chart:
        return _Chart(profile, None)
    return _Chart(profile, 1 if state.theta < math.pi / 2 else -1)


def _rk4(fun, y: np.ndarray, h: float) -> np.ndarray:
    k1 = fun(y)
    k2 = fun(y + 0.5 * h * k1)
    k3 = fun(y + 0.5 * h * k2)
    k4 = fun(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_flow(profile: FormProfile, start: FlowState, duration: float, step: float) -> list[FlowState]:
    """Fixed-step RK4 trajectory, switching charts where ``sin(theta) < 0.05``.

    ``lambda(R) = 1`` is monitored at every step.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    if duration < 0:
        raise ValueError("duration must be nonnegative")
    traj = [start]
    if duration == 0:
        return traj
    nsteps = max(1, math.ceil(duration / step - 1e-12))
    h = duration / nsteps
    state = start
    chart = _chart_for(profile, state)
    q = chart.to_chart(state)
    for _ in range(nsteps):
        q = _rk4(lambda y: chart.reeb(y[None])[0], q, h)
        try:
            new = chart.from_chart(q)
        except (ValueError, IntegrationError) as exc:
            raise IntegrationError(f"chart failure: {exc}", state) from exc
        a, c = chart.curl(q[None])
        r = c[0] / float(a[0] @ c[0])
        if abs(float(a[0] @ r) - 1.0) > 1e-8:
            raise IntegrationError("lambda(R) drifted from 1", state)
        state = new
        traj.append(state)
        if new.in_pole_chart != (chart.pole_u is not None):
            chart = _chart_for(profile, new)
            q = chart.to_chart(new)
    return traj


def _orbit_setup(profile: FormProfile, orbit) -> tuple[_Chart, np.ndarray, int, int, float]:
    """Chart, start point, section coordinate, target displacement, predicted period."""
    if isinstance(orbit, MorseBottFamily):
        state = FlowState(0.0, orbit.theta0, 0.0)
        chart = _chart_for(profile, state)
        if chart.pole_u is not None:
            raise IntegrationError("family lies inside the pole chart; oracle supports spherical-chart families only")
        if orbit.m != 0:
            return chart, chart.to_chart(state), 0, orbit.m, orbit.action
        return chart, chart.to_chart(state), 2, orbit.n, orbit.action
    u = _pole_u(orbit)
    chart = _Chart(profile, u)
    a1, _ = profile.coefficients(0.0 if u == 1 else math.pi)
    return chart, np.zeros(3), 0, 1, TWO_PI * float(a1)


def _hermite_root(q0, q1, v0, v1, h, coord, target):
    """Time in [0, h] where the cubic Hermite interpolant of coordinate hits target."""
    p0, p1 = q0[coord] - target, q1[coord] - target
    m0, m1 = v0[coord] * h, v1[coord] * h

    def cubic(s):
        return (
            (2 * s**3 - 3 * s**2 + 1) * p0
            + (s**3 - 2 * s**2 + s) * m0
            + (-2 * s**3 + 3 * s**2) * p1
            + (s**3 - s**2) * m1
        )

    lo, hi = 0.0, 1.0
    flo = cubic(lo)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        fm = cubic(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi) * h


def _closure_gap(chart: _Chart, end: np.ndarray, start: np.ndarray, coord: int) -> float:
    gap = 0.0
    for i in (0, 1, 2):
        if i == coord:
            continue
        d = end[i] - start[i]
        if i == 0 or (chart.pole_u is None and i == 2):
            d = (d + math.pi) % TWO_PI - math.pi
        gap = max(gap, abs(d))
    return gap


def measure_periods(profile: FormProfile, orbits, steps_per_period: int = DEFAULT_STEPS) -> list[float]:
    """First return times, found on a Poincare section; orbits sharing a
    chart are integrated together as rows of one RK4 system."""
    setups = [_orbit_setup(profile, o) for o in orbits]
    periods: list[float | None] = [None] * len(setups)
    groups: dict = {}
    for i, (chart, *_rest) in enumerate(setups):
        groups.setdefault(chart.pole_u, []).append(i)
    for rows in groups.values():
        chart = setups[rows[0]][0]
        q0 = np.array([setups[i][1] for i in rows])
        coord = np.array([setups[i][2] for i in rows])
        winding = np.array([setups[i][3] for i in rows], dtype=float)
        predicted = np.array([setups[i][4] for i in rows])
        target = q0[np.arange(len(rows)), coord] + TWO_PI * winding
        sense = np.sign(winding)
        h = predicted / steps_per_period
        hcol = h[:, None]
        q, v = q0.copy(), chart.reeb(q0)
        done = np.zeros(len(rows), dtype=bool)
        for step_count in range(3 * steps_per_period):
            k1 = v
            k2 = chart.reeb(q + 0.5 * hcol * k1)
            k3 = chart.reeb(q + 0.5 * hcol * k2)
            k4 = chart.reeb(q + hcol * k3)
            qn = q + (hcol / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            vn = chart.reeb(qn)
            hit = ~done & (sense * (qn[np.arange(len(rows)), coord] - target) >= 0.0)
            fun = lambda y: chart.reeb(y[None])[0]  # noqa: E731
            for j in np.nonzero(hit)[0]:
                dt = _hermite_root(q[j], qn[j], v[j], vn[j], h[j], coord[j], target[j])
                end = _rk4(fun, q[j], dt)
                gap = _closure_gap(chart, end, q0[j], coord[j])
                elapsed = step_count * h[j] + dt
                if gap > 1e-6:
                    raise NonClosureError(
                        f"section reached at time {elapsed:.9g} but orbit misses start by {gap:.3g}"
                    )
                periods[rows[j]] = float(elapsed)
                done[j] = True
            if done.all():
                break
            q, v = qn, vn
        if not done.all():
            bad = predicted[~done][0]
            raise NonClosureError(f"no return within 3x the predicted period {bad:.9g}")
    return periods  # type: ignore[return-value]


def measure_period(profile: FormProfile, orbit, steps_per_period: int = DEFAULT_STEPS) -> float:
    """First return time to the start point."""
    return measure_periods(profile, [orbit], steps_per_period)[0]


def period_convergence(profile: FormProfile, orbit, steps_per_period: int = DEFAULT_STEPS) -> float:
    """Change in measured period when the RK4 step is halved."""
    return abs(measure_period(profile, orbit, steps_per_period) - measure_period(profile, orbit, 2 * steps_per_period))


@dataclass
class ReturnMapReport:
    period: float
    monodromy: np.ndarray
    classification: str  # elliptic | positive-hyperbolic | negative-hyperbolic | degenerate-shear
    rotation: float | None = None
    shear: float | None = None
    determinant: float = 1.0
    extras: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "period": self.period,
            "monodromy": self.monodromy.tolist(),
            "determinant": self.determinant,
            "classification": self.classification,
            "rotation": self.rotation,
            "shear": self.shear,
        }


def linearized_return(
    profile: FormProfile,
    orbit,
    steps_per_period: int = VARIATIONAL_STEPS,
    shear_tol: float = 1e-6,
) -> ReturnMapReport:
    """Monodromy of the linearised flow on the contact planes.

    Families use the frame ``(d_theta, a_perp)`` with ``a_perp = a2 d_t - a1 d_phi``;
    pole orbits use the Cartesian frame ``(d_x, d_y)``.
    """
    period = measure_period(profile, orbit, steps_per_period)
    chart, q0, _, _, _ = _orbit_setup(profile, orbit)
    nsteps = steps_per_period
    h = period / nsteps

    def fun(y):
        vel, jac = chart.reeb_and_jacobian(y[:3])
        return np.concatenate([vel, (jac @ y[3:].reshape(3, 3)).ravel()])

    y = np.concatenate([q0, np.eye(3).ravel()])
    for _ in range(nsteps):
        y = _rk4(fun, y, h)
    flow = y[3:].reshape(3, 3)

    a, c = chart.curl(q0[None])
    a, c = a[0], c[0]
    reeb = c / float(a @ c)
    if chart.pole_u is None:
        e1, e2 = np.array([0.0, 1.0, 0.0]), np.array([a[2], 0.0, -a[0]])
    else:
        e1, e2 = np.array([0.0, 1.0, 0.0]), np.array([0.0, 0.0, 1.0])
    frame = np.column_stack([reeb, e1, e2])
    coords = np.linalg.solve(frame, flow @ frame[:, 1:])
    mono = coords[1:, :]
    det = float(np.linalg.det(mono))
    if abs(det - 1.0) > 1e-4:
        raise AccuracyError(f"monodromy determinant {det:.8g} deviates from 1")

    tr = float(np.trace(mono))
    report = ReturnMapReport(period, mono, "", determinant=det)
    if abs(tr - 2.0) <= shear_tol:
        report.classification = "degenerate-shear"
        report.shear = float(mono[1, 0])
    elif tr > 2.0:
        report.classification = "positive-hyperbolic"
    elif tr < -2.0:
        report.classification = "negative-hyperbolic"
    else:
        report.classification = "elliptic"
        # orientation of the frame relative to d lambda
        orient = 1.0 if float(c @ np.cross(e1, e2)) > 0 else -1.0
        angle = math.acos(max(-1.0, min(1.0, tr / 2.0))) * math.copysign(1.0, mono[1, 0])
        report.rotation = (orient * angle / TWO_PI) % 1.0
        report.extras["frame_orientation"] = orient
    if chart.pole_u is not None:
        report.extras["pole"] = pole_name(chart.pole_u)
    return report
