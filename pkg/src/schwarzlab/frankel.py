"""The Ricci integral ``int_0^d -Ric(gamma', gamma') ds`` along perpendicular
geodesics, by independent routes.

* ``ricci_integral_direct``: integrate the geodesic ODE and the curvature
  along it.
* ``ricci_integral_alpha_form``: the one-parameter integral over
  ``psi in [0, pi/2]`` that the full integral reduces to after the
  substitutions ``s -> r -> u -> t -> v -> psi``;
  ``direct = m (n-2) / C0^{n-1} * alpha_form``.
* ``R_functional``: the integral written in the areal coordinate for an
  arbitrary profile, regularized by ``u = u0 / sin(psi)``.
* ``R_series_schwarzschild``: the binomial series of that integral for the
  Schwarzschild profile.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy import integrate, special

from .curvature import ricci_along_geodesic
from .errors import DomainError, IntegrationError, ParameterError
from .geodesic import (DEFAULT_TOL, TRUNCATION_FACTOR, integrate_geodesic,
                       radial_speed_closed_form)
from .metric import MetricProfile, SchwarzschildParams, u_form

__all__ = [
    "QuadratureResult", "AlphaParameter", "SeriesResult", "wallis", "alpha_parameter",
    "horizon_ricci", "ricci_integral_direct", "ricci_integral_partials",
    "ricci_integral_alpha_form", "alpha_form_prefactor", "R_functional",
    "R_series_schwarzschild", "leading_series_term",
]

R_TRUNCATION = 1e6          # R_functional is cut off at u = R_TRUNCATION * u0
SERIES_MAX_TERMS = 10 ** 8
_SERIES_CHUNK = 1 << 18
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)
_GL4_NODES, _GL4_WEIGHTS = np.polynomial.legendre.leggauss(5)


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    truncation_point: float = math.inf
    evaluations: int = 0


@dataclass(frozen=True)
class AlphaParameter:
    """``alpha = 2m / C0^{n-2}``; 1 on the horizon, in (0, 1) outside it."""

    alpha: float
    C0: float

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha!r}")


@dataclass(frozen=True)
class SeriesResult:
    value: float
    terms_used: int
    tail_bound: float
    partial_sums: Optional[np.ndarray] = field(default=None, repr=False, compare=False)


def wallis(p):
    """``int_0^{pi/2} sin^p(psi) dpsi = B((p+1)/2, 1/2) / 2``."""
    p = np.asarray(p, float)
    if np.any(p < 0):
        raise DomainError("Wallis integral needs p >= 0")
    val = 0.5 * special.beta((p + 1) / 2, 0.5)
    return float(val) if val.ndim == 0 else val


def _areal(params, r):
    n = params.n
    return r * (1 + params.m / (2 * r ** (n - 2))) ** (2 / (n - 2))


def alpha_parameter(params: SchwarzschildParams, r0: float) -> AlphaParameter:
    if params.k != 1:
        raise ParameterError("alpha is defined for k = 1")
    R = params.horizon_radius
    if r0 < R * (1 - 1e-13):
        raise DomainError("r0 must lie on or outside the horizon")
    C0 = _areal(params, max(r0, R))
    alpha = min(2 * params.m / C0 ** (params.n - 2), 1.0)
    return AlphaParameter(alpha=alpha, C0=C0)


def horizon_ricci(params: SchwarzschildParams):
    """Constant Ricci curvature of a geodesic running along the horizon."""
    n, m = params.n, params.m
    return (n - 2) / (2 ** (n / (n - 2)) * m ** (2 / (n - 2)))


def alpha_form_prefactor(params: SchwarzschildParams, C0: float):
    """Factor turning the alpha-form integral into ``int -Ric ds``."""
    return params.m * (params.n - 2) / C0 ** (params.n - 1)


# --- direct route -----------------------------------------------------------

def _hermite_r(trace, t):
    """Quintic Hermite interpolant of ``r`` on every step, at fractions ``t``.

    Returns an array of shape (steps, len(t)).
    """
    h = np.diff(trace.s)[:, None]
    r0, r1 = trace.r[:-1, None], trace.r[1:, None]
    v0, v1 = trace.rdot[:-1, None], trace.rdot[1:, None]
    a0, a1 = trace.rddot[:-1, None], trace.rddot[1:, None]
    t2, t3 = t * t, t ** 3
    t4, t5 = t3 * t, t3 * t2
    H0 = 1 - 10 * t3 + 15 * t4 - 6 * t5
    H1 = t - 6 * t3 + 8 * t4 - 3 * t5
    H2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5
    H3 = 0.5 * t3 - t4 + 0.5 * t5
    H4 = -4 * t3 + 7 * t4 - 3 * t5
    H5 = 10 * t3 - 15 * t4 + 6 * t5
    return (H0 * r0 + H1 * h * v0 + H2 * h * h * a0
            + H3 * h * h * a1 + H4 * h * v1 + H5 * r1)


def _step_integrals(trace, nodes, weights):
    t = 0.5 * (nodes + 1)
    r = _hermite_r(trace, t)
    neg_ric = -ricci_along_geodesic(trace.params, np.maximum(r, trace.params.horizon_radius),
                                    trace.C0)
    return 0.5 * np.diff(trace.s) * (neg_ric @ weights)


def _tail(params, r_T, C0):
    """Leading-order tail of the integral beyond ``r_T`` and a bound on the rest.

    For large r, ``-Ric ds ~ m(n-1)(n-2) r^{-n} dr``.  The remainder is bounded
    using ``w >= 1``, ``rdot`` increasing in ``r`` and ``C0^2/u^2``
    decreasing.
    """
    n, m = params.n, params.m
    lead = (n - 2) * m / r_T ** (n - 1)
    w_T = 1 + m / (2 * r_T ** (n - 2))
    rdot_T = radial_speed_closed_form(params, r_T, C0)
    X_T = (C0 / _areal(params, r_T)) ** 2
    delta = max(1 - w_T ** (-2 * n / (n - 2)), 1 / rdot_T - 1)
    bound = lead / (n - 1) * ((n - 1) * delta + n * X_T / rdot_T)
    return lead, bound


def ricci_integral_partials(params: SchwarzschildParams, r0: float, tol: float = DEFAULT_TOL,
                            *, r_stop: Optional[float] = None):
    """Cumulative ``int_0^{s_i} -Ric ds`` at every state of an integrated trace.

    Returns ``(trace, cumulative)`` with ``cumulative[0] = 0``.
    """
    trace = integrate_geodesic(params, r0, tol=tol, r_stop=r_stop)
    if trace.on_horizon:
        return trace, -horizon_ricci(params) * trace.s
    steps = _step_integrals(trace, _GL_NODES, _GL_WEIGHTS)
    return trace, np.concatenate([[0.0], np.cumsum(steps)])


def ricci_integral_direct(params: SchwarzschildParams, r0: float, d: float = math.inf,
                          tol: float = DEFAULT_TOL) -> QuadratureResult:
    """``int_0^d -Ric(gamma', gamma') ds`` along the integrated geodesic.

    Every integrator step is integrated with 8-point Gauss-Legendre on a
    quintic Hermite interpolant of ``r(s)``.  For ``d = inf`` the geodesic
    is followed to ``r_T = TRUNCATION_FACTOR * max(r0, R)``, the leading
    asymptotic tail is added, and the tail's remainder bound goes into
    ``error_estimate``.
    """
    if not d > 0:
        raise DomainError("d must be positive")
    alpha = alpha_parameter(params, r0)
    if alpha.alpha == 1.0 and r0 <= params.horizon_radius * (1 + 1e-13):
        value = -horizon_ricci(params) * d
        return QuadratureResult(value=value, error_estimate=0.0,
                                truncation_point=d, evaluations=0)
    try:
        if math.isinf(d):
            trace = integrate_geodesic(params, r0, tol=tol)
        else:
            trace = integrate_geodesic(params, r0, s_max=d, tol=tol)
    except IntegrationError:
        raise
    hi = _step_integrals(trace, _GL_NODES, _GL_WEIGHTS)
    lo = _step_integrals(trace, _GL4_NODES, _GL4_WEIGHTS)
    value = float(np.sum(hi))
    err = float(np.sum(np.abs(hi - lo))) + tol * float(np.sum(np.abs(hi)))
    err += trace.max_arclength_residual * abs(value)
    truncation = float(trace.s[-1])
    if math.isinf(d):
        lead, bound = _tail(params, float(trace.r[-1]), trace.C0)
        value += lead
        err += bound
        truncation = float(trace.r[-1])
    evals = 6 * (len(trace) - 1 + trace.rejected_steps) + (len(trace) - 1) * 13
    return QuadratureResult(value=value, error_estimate=err,
                            truncation_point=truncation, evaluations=evals)


# --- alpha form ---------------------------------------------------------------

def ricci_integral_alpha_form(n: int, alpha: float, tol: float = DEFAULT_TOL) -> QuadratureResult:
    """``int_0^{pi/2} [(n-1) sin^{n-2} - n sin^n] / sqrt(1 - alpha sin^{n-2}) dpsi``.

    Regular for ``alpha < 1``; the integrand becomes sharply peaked at
    ``pi/2`` as ``alpha -> 1``, so a breakpoint is placed at the peak width.
    """
    if int(n) != n or n < 3:
        raise ParameterError("n must be an integer >= 3")
    if not 0 <= alpha < 1:
        raise DomainError("alpha must lie in [0, 1); the integral diverges at alpha = 1")

    def integrand(psi):
        s = math.sin(psi)
        sp = s ** (n - 2)
        return ((n - 1) * sp - n * sp * s * s) / math.sqrt(1 - alpha * sp)

    half_pi = 0.5 * math.pi
    width = math.sqrt(1 - alpha)
    points = [half_pi - c * width for c in (1.0, 10.0) if c * width < 0.5]
    value, err, info = integrate.quad(integrand, 0.0, half_pi, epsabs=0.1 * tol,
                                      epsrel=0.1 * tol, limit=500, points=points or None,
                                      full_output=True)[:3]
    return QuadratureResult(value=float(value), error_estimate=float(err),
                            truncation_point=half_pi, evaluations=int(info["neval"]))


# --- areal-coordinate functional -------------------------------------------------

def R_functional(profile: MetricProfile, u0: float, tol: float = DEFAULT_TOL,
                 *, use_u_form: bool = True) -> QuadratureResult:
    """``R(phi, u0)``: the Ricci integral of the geodesic with ``u(r0) = u0``.

        int_{u0}^inf [((n-1)/u - (n-2)u0^2/u^3) u f'(u) - ((n-2)u0^2/u^3) B(f(u))]
                     / sqrt(u^2 - u0^2) du,      B(x) = 1/x - x.

    With ``u = u0 / sin(psi)`` this is ``int_0^{pi/2} F(u0/sin psi) / sin psi dpsi``
    with a bounded integrand.  The range ``u > R_TRUNCATION * u0`` is dropped
    and bounded by ``psi_min * |integrand(psi_min)|``.  Pass
    ``use_u_form=False`` to compute ``f`` from ``phi`` even when the profile
    carries an exact u-form.
    """
    C = profile.areal_horizon
    if not u0 > C:
        raise DomainError(f"u0 must exceed C_phi = {C!r}")
    n = profile.n
    if use_u_form:
        f, u_df, one_minus_fsq = u_form(profile)
    else:
        f, u_df, one_minus_fsq = u_form(replace(profile, u_form=None))
    u0sq = u0 * u0

    def integrand(psi):
        s = math.sin(psi)
        u = u0 / s
        fu = float(f(u))
        c = (n - 2) * u0sq / u ** 3
        B = float(one_minus_fsq(u)) / fu
        return (((n - 1) / u - c) * float(u_df(u)) - c * B) / s

    psi_min = math.asin(1 / R_TRUNCATION)
    points = sorted(math.asin(u0 / b) for b in profile.features if b > u0 * (1 + 1e-12))
    value, err, info = integrate.quad(integrand, psi_min, 0.5 * math.pi, epsabs=0.1 * tol * abs(
        integrand(1.0)), epsrel=0.1 * tol, limit=500, points=points or None,
        full_output=True)[:3]
    tail = psi_min * abs(integrand(psi_min))
    return QuadratureResult(value=float(value), error_estimate=float(err) + tail,
                            truncation_point=R_TRUNCATION * u0,
                            evaluations=int(info["neval"]) + 2)


# --- series ---------------------------------------------------------------------

def _series_terms(n, alpha, u0, j):
    """Magnitudes of the series terms with indices ``j`` (all positive)."""
    K = (2 * n - 2) / (n - 2)
    coef = special.beta(j + 1.5, 0.5) / math.pi          # C(2j+1, j) / 2^{2j+1}
    W = 0.5 * special.beta(((j + 2) * (n - 2) + 1) / 2, 0.5)
    power = np.exp((j + 2) * math.log(alpha))
    return coef * (n - 2) / 2 * (j + 1) / (j + K) * W * power / u0


def leading_series_term(params: SchwarzschildParams, u0: float):
    """Magnitude of the ``j = 0`` term, ``(n-2)^2 m^2 W(2n-4) / ((2n-2) u0^{2n-3})``."""
    n, m = params.n, params.m
    return (n - 2) ** 2 * m ** 2 / (2 * n - 2) * wallis(2 * n - 4) / u0 ** (2 * n - 3)


def R_series_schwarzschild(params: SchwarzschildParams, u0: float, terms: Optional[int] = None,
                           *, rtol: float = 1e-12, max_terms: int = SERIES_MAX_TERMS,
                           keep_partials: bool = False) -> SeriesResult:
    """Binomial series of ``R(phi_{n,m}, u0)``.

    Terms are summed until the geometric tail bound drops below
    ``rtol * |partial sum|`` (or exactly ``terms`` of them).  For ``j >= 2``
    consecutive terms shrink at least by the factor ``alpha = 2m/u0^{n-2}``,
    so the tail after the last summed term ``t`` is at most
    ``t * alpha / (1 - alpha)``.
    """
    if params.k != 1:
        raise ParameterError("the series is for the k = 1 Schwarzschild profile")
    n, m = params.n, params.m
    C = params.areal_horizon
    if not u0 > C:
        raise DomainError(f"u0 must exceed (2m)^(1/(n-2)) = {C!r}")
    if terms is not None and terms < 1:
        raise ParameterError("terms must be >= 1")
    alpha = 2 * m / u0 ** (n - 2)
    ratio = alpha / (1 - alpha)
    limit = terms if terms is not None else max_terms

    total = 0.0
    used = 0
    last = math.inf
    partials = [] if keep_partials else None
    while used < limit:
        count = min(_SERIES_CHUNK, limit - used)
        j = np.arange(used, used + count, dtype=float)
        t = _series_terms(n, alpha, u0, j)
        csum = total + np.cumsum(t)
        if terms is None:
            tails = t * ratio
            stop = np.nonzero((tails < rtol * csum) & (j >= 2))[0]
            if stop.size:
                k = int(stop[0])
                if keep_partials:
                    partials.append(csum[:k + 1])
                total = float(csum[k])
                used += k + 1
                last = float(t[k])
                break
        if keep_partials:
            partials.append(csum)
        total = float(csum[-1])
        used += count
        last = float(t[-1])
    if used >= 3:
        tail = last * ratio
    else:
        # the ratio bound only holds from j = 2 on; sum the gap explicitly
        gap = _series_terms(n, alpha, u0, np.arange(used, 3, dtype=float))
        tail = float(np.sum(gap)) + float(gap[-1]) * ratio
    if terms is None and not tail < rtol * total:
        raise IntegrationError("series did not converge within max_terms",
                               {"alpha": alpha, "terms": used, "tail": tail})
    ps = -np.concatenate(partials) if keep_partials else None
    return SeriesResult(value=-total, terms_used=used, tail_bound=tail, partial_sums=ps)
