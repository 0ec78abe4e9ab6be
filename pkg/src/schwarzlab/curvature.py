"""Curvature of conformally flat metrics along geodesics and radial profiles."""

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError, UnsupportedDimensionError
from .metric import MetricProfile, SchwarzschildParams, areal_coordinate
from .roots import invert_increasing

__all__ = [
    "Route", "CurvatureSample", "ricci_along_geodesic", "ricci_sign_change_radius",
    "conformal_ricci_oracle", "scalar_curvature_u_form", "scalar_curvature_terms", "scalar_curvature_conformal",
    "bakry_emery_ricci",
]


class Route(enum.Enum):
    closed_form = "closed_form"
    conformal_general = "conformal_general"
    u_form = "u_form"


@dataclass(frozen=True)
class CurvatureSample:
    location: float
    value: float
    route: Route


def _w(params, r):
    return 1 + params.m / (2 * np.asarray(r, float) ** (params.n - 2))


def ricci_along_geodesic(params: SchwarzschildParams, r, C0):
    """Ricci curvature ``Ric(gamma', gamma')`` of a unit-speed geodesic.

    Depends on the geodesic only through its radius ``r`` and angular
    momentum ``C0``:

        m(n-2) / (r^n w^{2n/(n-2)}) * [n C0^2 / (r^2 w^{4/(n-2)}) - (n-1)],
        w = 1 + m / (2 r^{n-2}).
    """
    if params.k != 1:
        raise ParameterError("closed-form Ricci along geodesics needs k = 1")
    if not C0 > 0:
        raise DomainError("C0 must be positive")
    r = np.asarray(r, float)
    if np.any(r < params.horizon_radius * (1 - 1e-13)):
        raise DomainError("r must lie on or outside the horizon")
    n, m = params.n, params.m
    w = _w(params, r)
    val = (m * (n - 2) / (r ** n * w ** (2 * n / (n - 2)))
           * (n * C0 ** 2 / (r ** 2 * w ** (4 / (n - 2))) - (n - 1)))
    return float(val) if val.ndim == 0 else val


def ricci_sign_change_radius(params: SchwarzschildParams, C0):
    """Radius where ``ricci_along_geodesic`` changes sign for this ``C0``.

    The bracket vanishes when ``u = r e^phi = C0 sqrt(n/(n-1))``.
    """
    n, m, R = params.n, params.m, params.horizon_radius
    target = C0 * np.sqrt(n / (n - 1))

    def u(r):
        return r * _w(params, r) ** (2 / (n - 2))

    def du(r):
        w = _w(params, r)
        return w ** (2 / (n - 2) - 1) * (w - m / r ** (n - 2))

    return invert_increasing(u, target, R, max(target, 2 * R), dfun=du, xtol=1e-16)


def conformal_ricci_oracle(profile: MetricProfile, x, v):
    """Ricci of ``e^{2phi} g_flat`` from the general conformal-change formula.

    ``Ric(v,v) = -(n-2)[Hess phi(v,v) - dphi(v)^2]
                 - [lap phi + (n-2)|grad phi|^2] |v|^2``  (flat Ricci = 0),
    with the radial derivatives of ``phi`` supplied by the profile.  ``x`` and
    ``v`` are flat components; ``v`` is not normalized.
    """
    x = np.asarray(x, float)
    v = np.asarray(v, float)
    n = profile.n
    if x.shape != (n,) or v.shape != (n,):
        raise DomainError(f"x and v must be vectors in R^{n}")
    r = float(np.linalg.norm(x))
    if r <= profile.horizon_radius:
        raise DomainError("x must lie outside the horizon")
    d1 = float(profile.dphi(r))
    d2 = float(profile.d2phi(r))
    xr = x @ v / r                   # radial component of v
    vv = v @ v
    hess_vv = d2 * xr ** 2 + (d1 / r) * (vv - xr ** 2)
    dphi_v = d1 * xr
    lap = d2 + (n - 1) * d1 / r
    return -(n - 2) * (hess_vv - dphi_v ** 2) - (lap + (n - 2) * d1 ** 2) * vv


def scalar_curvature_u_form(profile: MetricProfile, u):
    """Scalar curvature of a 3-dimensional profile as a function of ``u``.

    ``Scal = -(2f/u^2)(2u f' - B(f))`` with ``B(x) = 1/x - x``, evaluated in
    the cancelled form ``-(2/u^2)(u (f^2)' - 1 + f^2)`` which is finite at the
    horizon ``u = C_phi``.
    """
    if profile.n != 3:
        raise UnsupportedDimensionError("the u-form of the scalar curvature is for n = 3")
    u = np.asarray(u, float)
    if np.any(u < profile.areal_horizon * (1 - 1e-13)):
        raise DomainError("u must be >= C_phi")
    u_dfsq, one_minus_fsq = scalar_curvature_terms(profile, u)
    val = -(2 / u ** 2) * (u_dfsq - one_minus_fsq)
    return float(val) if np.ndim(val) == 0 else val


def scalar_curvature_terms(profile: MetricProfile, u):
    """The two terms ``(u (f^2)', 1 - f^2)`` whose difference gives ``Scal``.

    They cancel exactly for scalar-flat profiles, so their size is the
    natural scale against which a computed ``Scal`` counts as zero.
    """
    u = np.asarray(u, float)
    if profile.u_form is not None:
        uf = profile.u_form
        one_minus_fsq = uf.one_minus_fsq(u) if uf.one_minus_fsq else 1 - uf.f(u) ** 2
        return u * uf.dfsq(u), one_minus_fsq
    r = areal_coordinate(profile, check=False).r_of_u(u)
    t = r * profile.dphi(r)
    # u (f^2)' = 2 r (phi' + r phi'');  1 - f^2 = -t (2 + t)
    return 2 * (t + r * r * profile.d2phi(r)), -t * (2 + t)


def scalar_curvature_conformal(profile: MetricProfile, r):
    """Scalar curvature in any dimension from ``phi`` (cross-check only).

    ``Scal = -e^{-2phi} [2(n-1) lap phi + (n-2)(n-1) |grad phi|^2]``.
    """
    n = profile.n
    r = np.asarray(r, float)
    d1, d2 = profile.dphi(r), profile.d2phi(r)
    lap = d2 + (n - 1) * d1 / r
    val = -np.exp(-2 * profile.phi(r)) * (2 * (n - 1) * lap + (n - 2) * (n - 1) * d1 ** 2)
    return float(val) if val.ndim == 0 else val


def bakry_emery_ricci(params: SchwarzschildParams, x, A, B):
    """Bakry-Emery Ricci ``Ric_f(A, B)`` of flat space weighted by the
    Schwarzschild conformal factor (flat inner products throughout)."""
    if params.k != 1:
        raise ParameterError("Bakry-Emery formula is for k = 1")
    x = np.asarray(x, float)
    A = np.asarray(A, float)
    B = np.asarray(B, float)
    rho = float(np.linalg.norm(x))
    if rho == 0:
        raise DomainError("the origin is excluded")
    n, m = params.n, params.m
    w = 1 + m / (2 * rho ** (n - 2))
    first = 2 * m / (rho ** n * w) * (A @ B)
    second = 2 * m * (n * rho ** (n - 2) + m) / (rho ** (2 * n) * w ** 2) * ((x @ A) * (x @ B))
    return float(first - second)
