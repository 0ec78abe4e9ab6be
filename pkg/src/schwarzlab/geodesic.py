"""Planar geodesics of the Riemannian Schwarzschild metric.

Geodesics start perpendicular to the radius vector (``rdot(0) = 0``) at
``r0`` and are followed in polar form ``(r, theta, rdot, thetadot)`` with
respect to arclength.  Two first integrals are monitored: the unit-speed
normalization ``e^{2 phi}(rdot^2 + r^2 thetadot^2) = 1`` and the angular
momentum ``C = r^2 e^{2 phi} thetadot``.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, IntegrationError, ParameterError
from .metric import SchwarzschildParams

__all__ = [
    "GeodesicState", "GeodesicTrace", "initial_state", "geodesic_rhs",
    "integrate_geodesic", "radial_speed_closed_form", "angular_momentum",
    "DEFAULT_TOL", "TRUNCATION_FACTOR",
]

DEFAULT_TOL = 1e-10
# Geodesics that escape are followed until r exceeds this multiple of max(r0, R).
TRUNCATION_FACTOR = 1e4
HORIZON_SAMPLES = 1025
_HORIZON_RTOL = 1e-13


@dataclass(frozen=True)
class GeodesicState:
    s: float
    r: float
    theta: float
    rdot: float
    thetadot: float


@dataclass(frozen=True, eq=False)
class GeodesicTrace:
    """Discretized geodesic, one entry per accepted integrator step.

    Arrays are indexed by step; ``rddot`` is the radial acceleration at each
    state (free from the FSAL stage), which lets callers build a quintic
    Hermite interpolant of ``r(s)``.
    """

    params: SchwarzschildParams
    r0: float
    C0: float
    s: np.ndarray
    r: np.ndarray
    theta: np.ndarray
    rdot: np.ndarray
    thetadot: np.ndarray
    rddot: np.ndarray
    max_arclength_residual: float
    max_C_residual: float
    on_horizon: bool = False
    rejected_steps: int = field(default=0)

    def __len__(self):
        return len(self.s)

    def __getitem__(self, i):
        return GeodesicState(float(self.s[i]), float(self.r[i]), float(self.theta[i]),
                             float(self.rdot[i]), float(self.thetadot[i]))

    @property
    def states(self):
        return [self[i] for i in range(len(self))]

    def arclength_residuals(self):
        return np.abs(_conformal_factor_sq(self.params, self.r)
                      * (self.rdot ** 2 + self.r ** 2 * self.thetadot ** 2) - 1)

    def C_residuals(self):
        return np.abs(angular_momentum(self.params, self.r, self.thetadot) - self.C0) / self.C0


def _require_k1(params):
    if params.k != 1:
        raise ParameterError("geodesic equations are implemented for the k = 1 Schwarzschild metric")


def _conformal_factor_sq(params, r):
    """``e^{2 phi} = (1 + m/(2 r^{n-2}))^{4/(n-2)}``."""
    n = params.n
    return (1 + params.m / (2 * np.asarray(r, float) ** (n - 2))) ** (4 / (n - 2))


def angular_momentum(params, r, thetadot):
    return np.asarray(r, float) ** 2 * _conformal_factor_sq(params, r) * thetadot


def _is_horizon(params, r0):
    R = params.horizon_radius
    if r0 < R * (1 - _HORIZON_RTOL):
        raise DomainError(f"r0 = {r0!r} lies inside the horizon radius {R!r}")
    return r0 <= R * (1 + _HORIZON_RTOL)


def initial_state(params: SchwarzschildParams, r0: float) -> GeodesicState:
    _require_k1(params)
    _is_horizon(params, r0)
    n = params.n
    thetadot0 = (1 + params.m / (2 * r0 ** (n - 2))) ** (-2 / (n - 2)) / r0
    return GeodesicState(0.0, float(r0), 0.0, 0.0, float(thetadot0))


def _rhs_factory(params):
    n, m = params.n, params.m
    ex = (n + 2) / (n - 2)

    def rhs(r, rdot, thetadot):
        w = 1 + m / (2 * r ** (n - 2))
        g = m / (r ** (n - 1) * w)
        rddot = r * thetadot ** 2 + 2 * g * rdot ** 2 - m / (r ** (n - 1) * w ** ex)
        thetaddot = -2 * rdot * thetadot / r + 2 * g * rdot * thetadot
        return rddot, thetaddot

    return rhs


def geodesic_rhs(params: SchwarzschildParams, state: GeodesicState):
    """Return ``(rdot, thetadot, rddot, thetaddot)`` for the polar geodesic system.

    The unit-speed normalization has been used to simplify the radial
    equation, so the result is the geodesic acceleration only for states
    with ``e^{2 phi}(rdot^2 + r^2 thetadot^2) = 1``.
    """
    _require_k1(params)
    if state.r <= 0:
        raise DomainError("r must be positive")
    rddot, thetaddot = _rhs_factory(params)(state.r, state.rdot, state.thetadot)
    return np.array([state.rdot, state.thetadot, rddot, thetaddot])


def radial_speed_closed_form(params: SchwarzschildParams, r, C0, *, slack=1e-12):
    """First-integral expression of ``rdot`` in terms of ``r`` and ``C0``.

    The radicand ``r^2 e^{2phi} - C0^2`` is evaluated as ``(u - C0)(u + C0)``
    with ``u = r e^{phi}``; values down to ``-slack * C0^2`` are clipped to 0.
    """
    _require_k1(params)
    r = np.asarray(r, float)
    e2 = _conformal_factor_sq(params, r)
    u = r * np.sqrt(e2)
    radicand = (u - C0) * (u + C0)
    if np.any(radicand < -slack * C0 ** 2):
        raise DomainError("r^2 e^{2phi} < C0^2: no geodesic with this C0 reaches r")
    val = np.sqrt(np.maximum(radicand, 0.0)) / (r * e2)
    return float(val) if val.ndim == 0 else val


# --- Dormand-Prince 5(4) ---------------------------------------------------

_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
# difference between the 5th and embedded 4th order weights
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

_SAFETY = 0.9
_BETA = 0.4 / 5     # PI controller gains (Gustafsson)
_ALPHA = 0.7 / 5
_MIN_FACTOR, _MAX_FACTOR = 0.2, 5.0


def _horizon_trace(params, r0, s_max):
    st = initial_state(params, r0)
    s = np.linspace(0.0, s_max, HORIZON_SAMPLES)
    ones = np.ones_like(s)
    trace = GeodesicTrace(
        params=params, r0=r0, C0=float(angular_momentum(params, r0, st.thetadot)),
        s=s, r=r0 * ones, theta=st.thetadot * s, rdot=0 * s, thetadot=st.thetadot * ones,
        rddot=0 * s, max_arclength_residual=0.0, max_C_residual=0.0, on_horizon=True,
    )
    return _with_residuals(trace)


def _with_residuals(trace):
    a = float(np.max(trace.arclength_residuals()))
    c = float(np.max(trace.C_residuals()))
    object.__setattr__(trace, "max_arclength_residual", a)
    object.__setattr__(trace, "max_C_residual", c)
    return trace


def integrate_geodesic(params: SchwarzschildParams, r0: float, s_max: Optional[float] = None,
                       tol: float = DEFAULT_TOL, *, r_stop: Optional[float] = None,
                       max_steps: int = 1_000_000) -> GeodesicTrace:
    """Integrate the perpendicular geodesic through ``r0``.

    Integration stops at ``s = s_max`` or once ``r >= r_stop``, whichever
    comes first.  With neither given, ``r_stop`` defaults to
    ``TRUNCATION_FACTOR * max(r0, R)``.  A geodesic started on the horizon
    stays there; its trace is returned in closed form and needs ``s_max``
    (default ``TRUNCATION_FACTOR * R``).
    """
    _require_k1(params)
    if not tol > 0:
        raise ParameterError("tol must be positive")
    if s_max is not None and not s_max > 0:
        raise ParameterError("s_max must be positive")
    on_horizon = _is_horizon(params, r0)
    R = params.horizon_radius
    if s_max is not None and math.isinf(s_max):
        s_max = None
    if on_horizon:
        return _horizon_trace(params, float(r0), s_max if s_max is not None else TRUNCATION_FACTOR * R)
    if s_max is None and r_stop is None:
        r_stop = TRUNCATION_FACTOR * max(r0, R)
    s_end = math.inf if s_max is None else float(s_max)
    r_end = math.inf if r_stop is None else float(r_stop)

    rhs = _rhs_factory(params)
    st = initial_state(params, r0)
    y = [st.r, st.theta, st.rdot, st.thetadot]
    rdd, tdd = rhs(y[0], y[2], y[3])
    k1 = [y[2], y[3], rdd, tdd]
    atol = (tol * r0, tol, tol, 1e-300)

    out_s, out_y, out_rdd = [0.0], [list(y)], [rdd]
    s = 0.0
    h = min(1e-3 * r0, s_end)
    err_prev = 1e-4
    rejected = 0
    for _ in range(max_steps):
        if s >= s_end or y[0] >= r_end:
            break
        h = min(h, s_end - s)
        if h <= 1e-14 * max(1.0, s) :
            raise IntegrationError("step size underflow",
                                   {"s": s, "r": y[0], "h": h, "rdot": y[2], "thetadot": y[3]})
        ks = [k1]
        for i in range(1, 7):
            a = _A[i]
            yi = [y[c] + h * sum(a[j] * ks[j][c] for j in range(i)) for c in range(4)]
            if yi[0] <= 0:
                break
            rdd_i, tdd_i = rhs(yi[0], yi[2], yi[3])
            ks.append([yi[2], yi[3], rdd_i, tdd_i])
        else:
            y_new = yi  # stage 7 point is the 5th-order solution (FSAL)
            err = 0.0
            for c in range(4):
                e_c = h * sum(_E[j] * ks[j][c] for j in range(7))
                sc = atol[c] + tol * max(abs(y[c]), abs(y_new[c]))
                err += (e_c / sc) ** 2
            err = math.sqrt(err / 4)
            if err <= 1.0:
                s += h
                y = y_new
                k1 = ks[6]
                out_s.append(s)
                out_y.append(list(y))
                out_rdd.append(k1[2])
                err = max(err, 1e-10)
                factor = _SAFETY * err ** -_ALPHA * err_prev ** _BETA
                err_prev = err
                h *= min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
                continue
            h *= max(_MIN_FACTOR, _SAFETY * err ** -(1 / 5))
            rejected += 1
            continue
        # a stage left r > 0; shrink and retry
        h *= _MIN_FACTOR
        rejected += 1
    else:
        raise IntegrationError("maximum number of steps exceeded",
                               {"s": s, "r": y[0], "h": h, "steps": max_steps})

    arr = np.asarray(out_y)
    trace = GeodesicTrace(
        params=params, r0=float(r0), C0=float(angular_momentum(params, r0, st.thetadot)),
        s=np.asarray(out_s), r=arr[:, 0], theta=arr[:, 1], rdot=arr[:, 2], thetadot=arr[:, 3],
        rddot=np.asarray(out_rdd), max_arclength_residual=0.0, max_C_residual=0.0,
        rejected_steps=rejected,
    )
    return _with_residuals(trace)
