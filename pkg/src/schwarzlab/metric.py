"""Rotationally symmetric conformally flat metrics ``e^{2 phi(r)} g_flat``.

A metric is carried by its conformal exponent ``phi`` and two analytic radial
derivatives.  The areal coordinate ``u = r e^{phi}`` and the profile function
``f(u) = 1 + r phi'(r)`` connect the Euclidean radius to the quantities the
Ricci integral is written in.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, ParameterError, ProfileError
from .roots import invert_increasing

__all__ = [
    "SchwarzschildParams", "MetricProfile", "UForm", "ArealCoordinate",
    "schwarzschild_profile", "schwarzschild_f", "inversion_map",
    "inversion_identity_residual", "areal_coordinate", "f_phi", "u_form",
    "log_grid", "condition_a_residual", "condition_b_margin", "check_profile",
]

GRID_POINTS = 512


@dataclass(frozen=True)
class SchwarzschildParams:
    """Dimension ``n``, ADM mass ``m`` and generalization exponent ``k``.

    ``k = 1`` is the Riemannian Schwarzschild metric; ``k > 1`` gives the
    metrics ``(1 + m / (2|x|^{(n-2k)/k}))^{4k/(n-2k)} g_flat``.
    """

    n: int
    m: float
    k: int = 1

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise ParameterError(f"dimension must be an integer >= 3, got {self.n!r}")
        if int(self.k) != self.k or self.k < 1:
            raise ParameterError(f"k must be a positive integer, got {self.k!r}")
        if not (np.isfinite(self.m) and self.m > 0):
            raise ParameterError(f"mass must be positive, got {self.m!r}")
        if self.n <= 2 * self.k:
            raise ParameterError(f"need n > 2k, got n={self.n}, k={self.k}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "m", float(self.m))

    @property
    def exponent(self):
        """Power ``p = (n - 2k)/k`` of ``|x|`` in the conformal factor."""
        return (self.n - 2 * self.k) / self.k

    @property
    def horizon_radius(self):
        return (self.m / 2) ** (1 / self.exponent)

    @property
    def areal_horizon(self):
        return (2 * self.m) ** (1 / self.exponent)


@dataclass(frozen=True)
class UForm:
    """Exact profile function in the areal coordinate.

    ``f(u)`` and ``dfsq(u) = d(f^2)/du``.  The square is used instead of
    ``f'`` because it stays finite at the horizon, where ``f`` vanishes like a
    square root.
    """

    f: Callable
    dfsq: Callable
    one_minus_fsq: Optional[Callable] = None


@dataclass(frozen=True)
class MetricProfile:
    n: int
    phi: Callable
    dphi: Callable
    d2phi: Callable
    horizon_radius: float
    areal_horizon: float
    # Known inverse of u(r); when absent it is found by root finding.
    r_of_u: Optional[Callable] = None
    u_form: Optional[UForm] = None
    # Areal radii where f has localized structure (quadrature hints).
    features: tuple = ()
    label: str = field(default="", compare=False)

    def u(self, r):
        return r * np.exp(self.phi(r))


@dataclass(frozen=True)
class ArealCoordinate:
    u: Callable
    r_of_u: Callable


def log_grid(lo, hi, num=GRID_POINTS):
    return np.geomspace(lo, hi, num)


# --- Schwarzschild and k-generalized metrics -------------------------------

def schwarzschild_profile(params: SchwarzschildParams) -> MetricProfile:
    p = params.exponent
    half_m = params.m / 2

    def phi(r):
        return (2 / p) * np.log1p(half_m * np.asarray(r, float) ** -p)

    def dphi(r):
        r = np.asarray(r, float)
        w = 1 + half_m * r ** -p
        return -params.m * r ** (-p - 1) / w

    def d2phi(r):
        r = np.asarray(r, float)
        w = 1 + half_m * r ** -p
        return (params.m * (p + 1) * r ** (-p - 2) / w
                - 0.5 * params.m ** 2 * p * r ** (-2 * p - 2) / w ** 2)

    def f(u):
        return schwarzschild_f(params, u)

    def dfsq(u):
        return 2 * params.m * p * np.asarray(u, float) ** (-p - 1)

    def one_minus_fsq(u):
        return 2 * params.m / np.asarray(u, float) ** p

    return MetricProfile(
        n=params.n, phi=phi, dphi=dphi, d2phi=d2phi,
        horizon_radius=params.horizon_radius, areal_horizon=params.areal_horizon,
        u_form=UForm(f=f, dfsq=dfsq, one_minus_fsq=one_minus_fsq),
        label=f"schwarzschild(n={params.n}, m={params.m:g}, k={params.k})",
    )


def schwarzschild_f(params: SchwarzschildParams, u):
    """Closed form ``sqrt(1 - 2m/u^p)`` of the Schwarzschild profile function."""
    u = np.asarray(u, float)
    return np.sqrt(np.maximum(1 - 2 * params.m / u ** params.exponent, 0.0))


def _check_point(x):
    x = np.asarray(x, dtype=float)
    norm = np.linalg.norm(x)
    if norm == 0:
        raise DomainError("the origin is excluded")
    return x, norm


def inversion_map(params: SchwarzschildParams, x):
    """Inversion in the horizon sphere, an isometry of the doubled manifold."""
    if params.k != 1:
        raise ParameterError("the inversion isometry is defined for k = 1")
    x, norm = _check_point(x)
    if x.shape != (params.n,):
        raise DomainError(f"expected a point in R^{params.n}")
    return (params.m / 2) ** (2 / (params.n - 2)) * x / norm ** 2


def inversion_identity_residual(params: SchwarzschildParams, x):
    """Relative defect of the conformal-factor identity for the inversion.

    Compares ``(1 + m/(2|Ix|^{n-2}))^{4/(n-2)} (m/2)^{4/(n-2)} / |x|^4`` with
    ``(1 + m/(2|x|^{n-2}))^{4/(n-2)}``; the difference is divided by the
    latter so the result is scale free.
    """
    x, norm = _check_point(x)
    n, m = params.n, params.m
    ix_norm = np.linalg.norm(inversion_map(params, x))
    e = 4 / (n - 2)
    lhs = (1 + m / (2 * ix_norm ** (n - 2))) ** e * (m / 2) ** e / norm ** 4
    rhs = (1 + m / (2 * norm ** (n - 2))) ** e
    return float(abs(lhs - rhs) / rhs)


# --- areal coordinate -------------------------------------------------------

def _du_dr(profile, r):
    return np.exp(profile.phi(r)) * (1 + r * profile.dphi(r))


def areal_coordinate(profile: MetricProfile, check=True) -> ArealCoordinate:
    """Return ``u(r) = r e^{phi(r)}`` and its inverse on ``u >= C_phi``."""
    R, C = profile.horizon_radius, profile.areal_horizon
    if check:
        r = log_grid(R, 1e6 * R)
        u = profile.u(r)
        if not (np.all(np.diff(u) > 0) and np.all(_du_dr(profile, r[1:]) > 0)):
            raise ProfileError("u(r) = r e^phi is not strictly increasing beyond the horizon")

    if profile.r_of_u is not None:
        return ArealCoordinate(u=profile.u, r_of_u=profile.r_of_u)

    def r_of_u(u):
        u = np.asarray(u, float)
        if np.any(u < C * (1 - 1e-13)):
            raise DomainError(f"u must be >= C_phi = {C!r}")
        u = np.maximum(u, C)
        r = invert_increasing(profile.u, u, R, np.maximum(u, 2 * R),
                              dfun=lambda r: _du_dr(profile, r), xtol=1e-16)
        return np.where(u == C, R, r) if np.ndim(r) else (R if u == C else r)

    return ArealCoordinate(u=profile.u, r_of_u=r_of_u)


def f_phi(profile: MetricProfile, u):
    """``1 + r(u) phi'(r(u))``, computed from ``phi`` through the inverse map."""
    u = np.asarray(u, float)
    if np.any(u < profile.areal_horizon * (1 - 1e-13)):
        raise DomainError(f"u must be >= C_phi = {profile.areal_horizon!r}")
    r = areal_coordinate(profile, check=False).r_of_u(u)
    val = 1 + r * profile.dphi(r)
    return float(val) if np.ndim(val) == 0 else val


def u_form(profile: MetricProfile):
    """Profile function in the areal coordinate, exact when the profile has one.

    Returns ``(f, u_df, one_minus_fsq)`` as vectorized callables of ``u``,
    where ``u_df = u f'(u)``.  Without an exact u-form everything is computed
    from ``phi`` via ``u f f' = r (phi' + r phi'')``.
    """
    if profile.u_form is not None:
        uf = profile.u_form

        def f(u):
            return uf.f(u)

        def u_df(u):
            u = np.asarray(u, float)
            return u * uf.dfsq(u) / (2 * uf.f(u))

        if uf.one_minus_fsq is not None:
            return f, u_df, uf.one_minus_fsq

        def one_minus_fsq(u):
            return 1 - uf.f(u) ** 2

        return f, u_df, one_minus_fsq

    r_of_u = areal_coordinate(profile, check=False).r_of_u

    def f(u):
        r = r_of_u(u)
        return 1 + r * profile.dphi(r)

    def u_df(u):
        r = r_of_u(u)
        d1 = profile.dphi(r)
        return r * (d1 + r * profile.d2phi(r)) / (1 + r * d1)

    def one_minus_fsq(u):
        r = r_of_u(u)
        t = r * profile.dphi(r)
        return -t * (2 + t)

    return f, u_df, one_minus_fsq


# --- conditions (a) and (b) -------------------------------------------------

def condition_a_residual(profile: MetricProfile, r):
    """``|e^{phi(R^2/r)} R^2/r - e^{phi(r)} r|`` relative to the right side."""
    r = np.asarray(r, float)
    R = profile.horizon_radius
    mirrored = R * R / r
    lhs = np.exp(profile.phi(mirrored)) * mirrored
    rhs = np.exp(profile.phi(r)) * r
    return np.abs(lhs - rhs) / rhs


def condition_b_margin(profile: MetricProfile, r):
    r = np.asarray(r, float)
    return 1 + r * profile.dphi(r)


def check_profile(profile: MetricProfile, *, a_tol=1e-9, deriv_tol=1e-5):
    """Verify conditions (a), (b) and the supplied derivatives on log grids.

    Raises ``ProfileError`` on the first violation.
    """
    R = profile.horizon_radius
    r_a = log_grid(R / 10, 10 * R)
    worst_a = float(np.max(condition_a_residual(profile, r_a)))
    if worst_a >= a_tol:
        raise ProfileError(f"condition (a) residual {worst_a:.3e} exceeds {a_tol:g}")

    r_b = log_grid(R, 1e6 * R)[1:]
    if not np.all(condition_b_margin(profile, r_b) > 0):
        raise ProfileError("condition (b) fails: 1 + r phi'(r) <= 0 beyond the horizon")

    r_d = log_grid(1.01 * R, 100 * R, 64)
    h = 1e-4 * r_d
    fd1 = (profile.phi(r_d + h) - profile.phi(r_d - h)) / (2 * h)
    fd2 = (profile.dphi(r_d + h) - profile.dphi(r_d - h)) / (2 * h)
    d1 = np.abs(profile.dphi(r_d))
    # rounding noise of the differenced values: phi ~ |phi| eps, r phi' ~ eps
    eps = 10 * np.finfo(float).eps
    noise1 = eps * (1 + np.abs(profile.phi(r_d))) / h
    noise2 = eps / (r_d * h)
    for name, fd, exact, scale, noise in (("dphi", fd1, profile.dphi(r_d), d1, noise1),
                                          ("d2phi", fd2, profile.d2phi(r_d), d1 / r_d, noise2)):
        scale = np.abs(exact) + scale
        err = float(np.max(np.maximum(np.abs(fd - exact) - noise, 0) / scale))
        if err > deriv_tol:
            raise ProfileError(f"{name} disagrees with finite differences (rel err {err:.2e})")
    return worst_a
