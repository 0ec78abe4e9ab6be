"""Metrics built from a prescribed profile function, and perturbation checks.

A profile function ``f`` on ``[C_f, inf)`` with ``f(C_f) = 0`` determines a
rotationally symmetric conformally flat metric: the Euclidean radius is

    h(u) = R_f exp( int_{C_f}^u dx / (x f(x)) ),

the conformal exponent is ``phi(h(u)) = log(u / h(u))``, and the interior
``r < R_f`` is filled in by reflection through the horizon sphere.  The
endpoint singularity is removed by ``x = C_f + w^2``.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from .curvature import scalar_curvature_terms, scalar_curvature_u_form
from .errors import (ConstructionError, DomainError, HypothesisError, ParameterError,
                     ProfileError)
from .frankel import R_functional
from .metric import (MetricProfile, SchwarzschildParams, UForm, schwarzschild_f,
                     schwarzschild_profile, u_form)
from .mollify import SmoothedPiecewiseLinear
from .roots import invert_increasing

__all__ = [
    "ProfileFunction", "PerturbationBudget", "PerturbationReport",
    "schwarzschild_profile_function", "example44_profile", "build_metric_from_f",
    "validate_profile_function", "integrability_test", "example44_E", "check_theorem42",
    "scalar_sign_scan",
    "tabulated_profile", "load_tabulated_profile", "save_tabulated_profile",
]

CHECK_GRID_POINTS = 2048
CHECK_GRID_SPAN = 1e4
# Table of the log-radius integral reaches u = C_f (1 + TABLE_SPAN).
TABLE_SPAN = 1e16
_GL_ORDER = 20


@dataclass(frozen=True, eq=False)
class ProfileFunction:
    """Profile function ``f`` on ``[C_f, inf)``.

    ``dfsq = d(f^2)/du`` and ``one_minus_fsq = 1 - f^2`` are optional exact
    forms; they default to ``2 f df`` and ``1 - f**2``.  ``breakpoints`` are
    locations of localized structure (kinks of an unsmoothed profile, table
    knots), each widened by ``feature_width`` on both sides.  ``n`` is the
    dimension of the metric the profile is meant for.
    """

    C_f: float
    f: Callable
    df: Callable
    dfsq: Optional[Callable] = None
    one_minus_fsq: Optional[Callable] = None
    breakpoints: tuple = ()
    feature_width: float = 0.0
    n: int = 3
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise ProfileError(f"dimension must be an integer >= 3, got {self.n!r}")
        if not (np.isfinite(self.C_f) and self.C_f > 0):
            raise ProfileError(f"C_f must be positive, got {self.C_f!r}")
        if self.feature_width < 0:
            raise ProfileError("feature_width must be nonnegative")
        object.__setattr__(self, "C_f", float(self.C_f))
        object.__setattr__(self, "breakpoints", tuple(float(b) for b in self.breakpoints))

    def fsq_derivative(self, u):
        if self.dfsq is not None:
            return self.dfsq(u)
        return 2 * self.f(u) * self.df(u)

    def complement(self, u):
        """``1 - f(u)^2``."""
        if self.one_minus_fsq is not None:
            return self.one_minus_fsq(u)
        return 1 - self.f(u) ** 2


def schwarzschild_profile_function(params: SchwarzschildParams) -> ProfileFunction:
    """``f_{n,m}(u) = sqrt(1 - 2m/u^p)`` with the same exact forms as the metric."""
    uf = schwarzschild_profile(params).u_form

    def df(u):
        u = np.asarray(u, float)
        return uf.dfsq(u) / (2 * uf.f(u))

    return ProfileFunction(C_f=params.areal_horizon, f=uf.f, df=df, dfsq=uf.dfsq,
                           one_minus_fsq=uf.one_minus_fsq, n=params.n,
                           label=f"f_schwarzschild(n={params.n}, m={params.m:g})")


# --- Example: mixed-sign scalar curvature in dimension 3 ----------------------

def _example44_E(m, eps):
    # E = 0 on [2m, 3m], slope -m/256 on [3m, 4m], +m/256 on [4m, 6m], flat after.
    s = m / 256
    return SmoothedPiecewiseLinear([3 * m, 4 * m, 6 * m], [-s, 2 * s, -s], eps)


def example44_profile(m: float, smoothing_width: Optional[float] = None) -> ProfileFunction:
    """``f = f_{3,m} + E_eps(u)/u^2`` with ``E`` piecewise linear, smoothed.

    ``E`` vanishes up to ``3m``, dips linearly to ``-m^2/256`` at ``4m``,
    rises to ``m^2/256`` at ``6m`` and stays constant.  Each kink is smoothed
    with a triweight kernel of half-width ``smoothing_width`` (default
    ``m/100``), so ``E_eps = E`` away from the kinks and ``f`` is C^4.
    """
    if not (np.isfinite(m) and m > 0):
        raise ParameterError(f"mass must be positive, got {m!r}")
    eps = m / 100 if smoothing_width is None else float(smoothing_width)
    if not 0 < eps < m / 4:
        raise ConstructionError(f"smoothing width must lie in (0, m/4), got {eps!r}")
    params = SchwarzschildParams(3, m)
    E = _example44_E(m, eps)

    def parts(u):
        u = np.asarray(u, float)
        e = E(u) / u ** 2
        de = E.derivative(u) / u ** 2 - 2 * E(u) / u ** 3
        return u, e, de

    def f(u):
        u, e, _ = parts(u)
        return schwarzschild_f(params, u) + e

    def df(u):
        u, e, de = parts(u)
        fs = schwarzschild_f(params, u)
        return m / (u ** 2 * fs) + de

    def dfsq(u):
        # 2 (fs + e)(fs' + e') with fs fs' = m/u^2; the e terms vanish
        # identically below 3m - eps, which keeps f = f_{3,m} bit-for-bit there.
        u, e, de = parts(u)
        fs = schwarzschild_f(params, u)
        with np.errstate(divide="ignore", invalid="ignore"):
            e_dfs = np.where(e == 0, 0.0, e * m / (u ** 2 * fs))
        return 2 * m * 1.0 * u ** -2.0 + 2 * (e_dfs + fs * de + e * de)

    def one_minus_fsq(u):
        u, e, _ = parts(u)
        fs = schwarzschild_f(params, u)
        return 2 * m / u ** 1.0 - 2 * fs * e - e * e

    pf = ProfileFunction(C_f=2 * m, f=f, df=df, dfsq=dfsq, one_minus_fsq=one_minus_fsq,
                         breakpoints=(3 * m, 4 * m, 6 * m), feature_width=eps,
                         label=f"example44(m={m:g}, eps={eps:g})")
    u = np.geomspace(2 * m, 1e4 * m, 4096)[1:]
    if not np.all(f(u) > 0):
        raise ConstructionError("smoothing makes f non-positive")
    return pf


def example44_E(m: float, smoothing_width: Optional[float] = None):
    """The smoothed and raw correction ``E`` used by ``example44_profile``."""
    eps = m / 100 if smoothing_width is None else float(smoothing_width)
    return _example44_E(m, eps)


# --- building a metric from f -------------------------------------------------

def _panel_edges(pf: ProfileFunction):
    C = pf.C_f
    s = np.sqrt(C)
    w = [0.0]
    w += list(s * np.geomspace(1e-6, np.sqrt(TABLE_SPAN), 200))
    for b in pf.breakpoints:
        offsets = np.linspace(-pf.feature_width, pf.feature_width, 9) if pf.feature_width else [0.0]
        for off in offsets:
            if b + off > C:
                w.append(np.sqrt(b + off - C))
    return np.unique(np.asarray(w))


class _LogRadius:
    """``G(u) = int_{C_f}^u dx / (x f(x))`` as a Gauss-Legendre panel table in ``w``."""

    def __init__(self, pf: ProfileFunction, order: int = _GL_ORDER):
        self.pf = pf
        slope_sq = float(pf.fsq_derivative(pf.C_f))
        self._slope = np.sqrt(slope_sq) if np.isfinite(slope_sq) and slope_sq > 0 else 0.0
        self.edges = _panel_edges(pf)
        self.nodes, self.weights = np.polynomial.legendre.leggauss(order)
        panels = self._panel(self.edges[:-1], self.edges[1:])
        if not np.all(np.isfinite(panels)) or np.any(panels <= 0):
            raise ProfileError("1/(u f(u)) is not positive and integrable on the table")
        self.cumulative = np.concatenate([[0.0], np.cumsum(panels)])
        self.u_max = pf.C_f + self.edges[-1] ** 2

    def _integrand(self, w):
        C = self.pf.C_f
        x = C + w * w
        with np.errstate(divide="ignore", invalid="ignore"):
            val = 2 * w / (x * self.pf.f(x))
        if self._slope > 0:
            # f(C + w^2) ~ w sqrt((f^2)'(C)); below this w, x = C + w^2 has too few
            # correct digits for f to be evaluated directly
            val = np.where(w * w < 1e-8 * C, 2 / (x * self._slope), val)
        return val

    def _panel(self, a, b):
        a = np.asarray(a, float)[..., None]
        b = np.asarray(b, float)[..., None]
        half = 0.5 * (b - a)
        w = a + half * (self.nodes + 1)
        return np.sum(self.weights * self._integrand(w), -1) * half[..., 0]

    def __call__(self, u):
        u = np.asarray(u, float)
        if np.any(u < self.pf.C_f) or np.any(u > self.u_max):
            raise DomainError("u outside the tabulated range of the log-radius integral")
        w = np.sqrt(u - self.pf.C_f)
        i = np.clip(np.searchsorted(self.edges, w, side="right") - 1, 0, len(self.edges) - 2)
        val = self.cumulative[i] + self._panel(self.edges[i], w)
        return float(val) if val.ndim == 0 else val

    def derivative(self, u):
        u = np.asarray(u, float)
        return 1 / (u * self.pf.f(u))


def integrability_test(pf: ProfileFunction, U: Optional[float] = None, rtol: float = 1e-8):
    """Compare ``int_{C_f}^U dx/(x f)`` at two Gauss-Legendre orders.

    Returns the relative change; raises ``ProfileError`` when it exceeds
    ``rtol`` (the quadrature is not converging).
    """
    U = 10 * pf.C_f if U is None else float(U)
    coarse = _LogRadius(pf, order=_GL_ORDER // 2)(U)
    fine = _LogRadius(pf, order=_GL_ORDER)(U)
    change = abs(fine - coarse) / abs(fine)
    if not change <= rtol:
        raise ProfileError(f"1/(u f) quadrature not converging near C_f (change {change:.2e})")
    return change


def validate_profile_function(pf: ProfileFunction, *, f_tol=1e-12):
    C = pf.C_f
    f0 = float(pf.f(C))
    # C_f itself is rounded; a square-root zero turns that into f ~ 1e-8, which
    # is the size of the change of f over a few ulps of C_f
    rounding = abs(float(pf.f(C * (1 + 4 * np.finfo(float).eps))) - f0)
    if abs(f0) > max(f_tol, rounding):
        raise ProfileError(f"f(C_f) = {f0!r}, expected 0")
    u = np.geomspace(C, CHECK_GRID_SPAN * C, 4096)[1:]
    if not np.all(pf.f(u) > 0):
        raise ProfileError("f must be positive beyond C_f")
    integrability_test(pf)


def build_metric_from_f(pf: ProfileFunction, R_f: float, *, validate: bool = True) -> MetricProfile:
    """Metric with horizon radius ``R_f`` whose profile function is ``pf.f``."""
    if not (np.isfinite(R_f) and R_f > 0):
        raise ParameterError(f"R_f must be positive, got {R_f!r}")
    if validate:
        validate_profile_function(pf)
    R = float(R_f)
    C = pf.C_f
    G = _LogRadius(pf)
    r_max = R * np.exp(G.cumulative[-1])

    def r_of_u(u):
        return R * np.exp(G(u))

    def u_of_outer(r):
        # r >= R only
        r = np.asarray(r, float)
        if np.any(r > r_max):
            raise DomainError("radius beyond the tabulated range")
        target = np.log(r / R)
        hi = np.minimum(C * (1 + np.maximum(2 * r / R, 2.0)), G.u_max)
        u = invert_increasing(G, target, C, hi, dfun=G.derivative, xtol=1e-16)
        return np.where(target <= 0, C, u) if np.ndim(u) else (C if target <= 0 else u)

    def _split(r):
        r = np.asarray(r, float)
        if np.any(r <= 0):
            raise DomainError("r must be positive")
        outer = r >= R
        rho = np.where(outer, r, R * R / r)
        u = u_of_outer(rho)
        return r, outer, u

    def _out(val):
        return float(val) if np.ndim(val) == 0 else val

    def phi(r):
        r, _, u = _split(r)
        return _out(np.log(u / r))

    def dphi(r):
        r, outer, u = _split(r)
        fu = pf.f(u)
        return _out(np.where(outer, fu - 1, -(1 + fu)) / r)

    def d2phi(r):
        r, outer, u = _split(r)
        fu = pf.f(u)
        half_u_dfsq = 0.5 * u * pf.fsq_derivative(u)
        return _out(np.where(outer, half_u_dfsq - fu + 1, 1 + fu + half_u_dfsq) / r ** 2)

    features = tuple(b + s * pf.feature_width for b in pf.breakpoints for s in (-1, 1)
                     if b + s * pf.feature_width > C)
    return MetricProfile(
        n=int(pf.n), phi=phi, dphi=dphi, d2phi=d2phi,
        horizon_radius=R, areal_horizon=C, r_of_u=r_of_u,
        u_form=UForm(f=pf.f, dfsq=pf.fsq_derivative, one_minus_fsq=pf.complement),
        features=features, label=f"built({pf.label or 'f'}, R_f={R:g})",
    )


# --- perturbation hypotheses --------------------------------------------------

@dataclass(frozen=True)
class PerturbationBudget:
    """Allowed deviation ``(a, b)`` from the Schwarzschild profile ``f_{n,m}``."""

    a: float
    b: float
    n: int
    m: float

    def __post_init__(self):
        if not (self.a >= 0 and self.b >= 0):
            raise ParameterError("a and b must be nonnegative")
        if int(self.n) != self.n or self.n < 3:
            raise ParameterError("n must be an integer >= 3")
        if not self.m > 0:
            raise ParameterError("m must be positive")

    @property
    def cond42_lhs(self):
        n = self.n
        return (3 * n - 4) * self.a + (2 * n - 3) * (n - 2) * self.b

    @property
    def cond42_rhs(self):
        return (self.n - 2) ** 2 * self.m ** 2

    def satisfies_cond42(self):
        return self.cond42_lhs < self.cond42_rhs


@dataclass(frozen=True)
class PerturbationReport:
    budget: PerturbationBudget
    cond41_margin_deriv: float
    cond41_margin_B: float
    cond42_lhs: float
    cond42_rhs: float
    R_samples: list
    passed: bool
    grid_range: tuple = ()
    R_errors: list = field(default_factory=list)

    @property
    def R_all_negative(self):
        return all(v < 0 for _, v in self.R_samples)

    def to_dict(self):
        return {
            "budget": {"a": self.budget.a, "b": self.budget.b, "n": self.budget.n,
                       "m": self.budget.m},
            "cond41_margin_deriv": self.cond41_margin_deriv,
            "cond41_margin_B": self.cond41_margin_B,
            "cond42_lhs": self.cond42_lhs,
            "cond42_rhs": self.cond42_rhs,
            "R_samples": [[u0, v] for u0, v in self.R_samples],
            "R_errors": list(self.R_errors),
            "R_all_negative": self.R_all_negative,
            "grid_range": list(self.grid_range),
            "passed": self.passed,
        }


def check_theorem42(profile: MetricProfile, params: SchwarzschildParams,
                    budget: PerturbationBudget, grid: Optional[Sequence[float]] = None,
                    u0_samples: Optional[Sequence[float]] = None,
                    tol: float = 1e-10) -> PerturbationReport:
    """Check the perturbation hypotheses against ``f_{n,m}`` and sample ``R``.

    The hypotheses are, for ``u`` beyond the horizon,

        u f_phi' - u f_{n,m}' <= a / u^{2n-4},
        B(f_phi) - B(f_{n,m}) >= -b / u^{2n-4},
        (3n-4) a + (2n-3)(n-2) b < (n-2)^2 m^2,

    and require ``C_phi >= (2m)^{1/(n-2)}``.  The default grid is 2048
    log-spaced points on ``(C_phi, 1e4 C_phi]``; the endpoint itself is
    excluded because ``f'`` is infinite there.  ``R(phi, u0)`` is sampled at
    ``u0_samples`` (default: 16 log-spaced points on ``[1.01, 25] C_phi``).
    """
    n, m = params.n, params.m
    if params.k != 1:
        raise ParameterError("perturbations are measured against the k = 1 metric")
    if profile.n != n or budget.n != n or budget.m != m:
        raise ParameterError("profile, params and budget disagree on (n, m)")
    C = profile.areal_horizon
    if C < params.areal_horizon * (1 - 1e-12):
        raise HypothesisError(f"C_phi = {C!r} is below (2m)^(1/(n-2)) = {params.areal_horizon!r}")

    if grid is None:
        u = np.geomspace(C * (1 + 1e-8), CHECK_GRID_SPAN * C, CHECK_GRID_POINTS)
    else:
        u = np.asarray(grid, float)
        if u.size == 0 or np.any(u <= C):
            raise DomainError("grid points must lie strictly beyond C_phi")
    f, u_df, one_minus_fsq = u_form(profile)
    fs, u_dfs, one_minus_fsq_s = u_form(schwarzschild_profile(params))
    weight = u ** (4 - 2 * n)
    margin_deriv = float(np.min(budget.a * weight - (u_df(u) - u_dfs(u))))
    margin_B = float(np.min(one_minus_fsq(u) / f(u) - one_minus_fsq_s(u) / fs(u)
                            + budget.b * weight))

    if u0_samples is None:
        u0_samples = np.geomspace(1.01 * C, 25 * C, 16)
    samples, errors = [], []
    for u0 in u0_samples:
        res = R_functional(profile, float(u0), tol=tol)
        samples.append((float(u0), res.value))
        errors.append(res.error_estimate)

    passed = (margin_deriv >= 0 and margin_B >= 0 and budget.satisfies_cond42())
    return PerturbationReport(
        budget=budget, cond41_margin_deriv=margin_deriv, cond41_margin_B=margin_B,
        cond42_lhs=float(budget.cond42_lhs), cond42_rhs=float(budget.cond42_rhs),
        R_samples=samples, passed=bool(passed), grid_range=(float(u[0]), float(u[-1])),
        R_errors=errors,
    )


def scalar_sign_scan(profile: MetricProfile, u_range, samples: int, *,
                     zero_tol: float = 1e-9, open_interval: bool = True):
    """Sign of the scalar curvature at ``samples`` evenly spaced ``u``.

    With ``open_interval`` the endpoints of ``u_range`` are excluded (the
    points are interior nodes of ``samples + 1`` equal subintervals).  A
    value counts as 0 when it is below ``zero_tol`` relative to the two
    cancelling terms it is computed from, so decaying curvature far out is
    still resolved while rounding noise of a scalar-flat metric is not.
    """
    lo, hi = map(float, u_range)
    samples = int(samples)
    if samples < 1 or not hi > lo:
        raise ParameterError("need samples >= 1 and a nonempty u range")
    if open_interval:
        u = np.linspace(lo, hi, samples + 2)[1:-1]
    else:
        u = np.linspace(lo, hi, samples)
    scal = np.atleast_1d(scalar_curvature_u_form(profile, u))
    a, b = scalar_curvature_terms(profile, u)
    scale = (2 / u ** 2) * (np.abs(a) + np.abs(b))
    sign = np.where(np.abs(scal) <= zero_tol * scale, 0, np.sign(scal)).astype(int)
    return [(float(x), int(s)) for x, s in zip(u, sign)]


# --- tabulated profiles -------------------------------------------------------

def tabulated_profile(u, f, *, n=3, label="tabulated") -> ProfileFunction:
    """Monotone-cubic profile through samples ``(u_i, f_i)``; ``f_0 = 0``.

    The interpolation is done in ``w = sqrt(u - C_f)``, where profiles that
    vanish like a square root are smooth.  Past the last sample ``f`` follows
    ``1 - (1 - f_N)(u_N/u)^q`` with ``q`` chosen to match the slope there.
    """
    u = np.asarray(u, float)
    f = np.asarray(f, float)
    if u.ndim != 1 or u.shape != f.shape or u.size < 4:
        raise ProfileError("need at least four (u, f) samples")
    if not np.all(np.diff(u) > 0):
        raise ProfileError("u samples must be strictly increasing")
    if not np.all(np.isfinite(f)) or np.any(f[1:] <= 0) or np.any(f >= 1):
        raise ProfileError("tabulated f must lie in (0, 1) beyond the first sample")
    C = float(u[0])
    w = np.sqrt(u - C)
    P = PchipInterpolator(w, f)
    dP = P.derivative()
    uN, fN, wN = u[-1], f[-1], w[-1]
    slope = float(dP(wN)) / (2 * wN)
    q = max(slope * uN / (1 - fN), 1e-3)

    def f_fun(x):
        x = np.asarray(x, float)
        wx = np.sqrt(np.maximum(x - C, 0.0))
        inner = P(np.minimum(wx, wN))
        outer = 1 - (1 - fN) * (uN / np.maximum(x, uN)) ** q
        val = np.where(x <= uN, inner, outer)
        return float(val) if val.ndim == 0 else val

    def df_fun(x):
        x = np.asarray(x, float)
        wx = np.sqrt(np.maximum(x - C, 0.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            inner = dP(np.minimum(wx, wN)) / (2 * wx)
        outer = q * (1 - fN) * uN ** q / np.maximum(x, uN) ** (q + 1)
        val = np.where(x <= uN, inner, outer)
        return float(val) if val.ndim == 0 else val

    def dfsq_fun(x):
        x = np.asarray(x, float)
        wx = np.sqrt(np.maximum(x - C, 0.0))
        wc = np.minimum(wx, wN)
        # 2 f f' = f P'(w) / w, whose limit at w = 0 is P'(0)^2
        with np.errstate(divide="ignore", invalid="ignore"):
            inner = np.where(wc > 0, P(wc) * dP(wc) / wc, dP(0.0) ** 2)
        val = np.where(x <= uN, inner, 2 * f_fun(x) * df_fun(x))
        return float(val) if val.ndim == 0 else val

    return ProfileFunction(C_f=C, f=f_fun, df=df_fun, dfsq=dfsq_fun,
                           breakpoints=tuple(u[1:]), n=n, label=label)


def load_tabulated_profile(path, n: int = 3) -> ProfileFunction:
    """Read a two-column text table ``u f(u)`` (whitespace or comma separated,
    ``#`` comments)."""
    try:
        data = np.loadtxt(path, comments="#", delimiter=None, ndmin=2)
    except ValueError:
        data = np.loadtxt(path, comments="#", delimiter=",", ndmin=2)
    if data.shape[1] != 2:
        raise ProfileError(f"expected two columns in {path}, found {data.shape[1]}")
    return tabulated_profile(data[:, 0], data[:, 1], n=n, label=str(path))


def save_tabulated_profile(path, pf: ProfileFunction, u):
    u = np.asarray(u, float)
    np.savetxt(path, np.column_stack([u, pf.f(u)]), fmt="%.17g", header="u f(u)")
