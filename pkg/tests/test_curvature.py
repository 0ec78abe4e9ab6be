import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from oracles import fd_hessian
from schwarzlab.curvature import (bakry_emery_ricci, conformal_ricci_oracle,
                                  ricci_along_geodesic, ricci_sign_change_radius,
                                  scalar_curvature_conformal, scalar_curvature_u_form)
from schwarzlab.errors import DomainError, UnsupportedDimensionError
from schwarzlab.geodesic import integrate_geodesic
from schwarzlab.metric import MetricProfile, SchwarzschildParams, schwarzschild_profile

dims = st.sampled_from([3, 4, 5, 7])
masses = st.floats(0.2, 5.0)


def _unit_vector(params, r, beta):
    """Point on the x-axis and a g-unit vector at angle beta to the radius."""
    n, m = params.n, params.m
    e_phi = (1 + m / (2 * r ** (n - 2))) ** (2 / (n - 2))
    x = np.zeros(n)
    x[0] = r
    v = np.zeros(n)
    v[:2] = math.cos(beta) / e_phi, math.sin(beta) / e_phi
    return x, v


@pytest.mark.parametrize("n,m,expected", [(3, 1.0, 0.125), (4, 1.0, 0.5), (5, 2.0, None)])
def test_horizon_value(n, m, expected):
    params = SchwarzschildParams(n, m)
    val = ricci_along_geodesic(params, params.horizon_radius, params.areal_horizon)
    const = (n - 2) / (2 ** (n / (n - 2)) * m ** (2 / (n - 2)))
    assert val == pytest.approx(const, rel=1e-14)
    if expected is not None:
        assert val == pytest.approx(expected, rel=1e-14)


@given(dims, masses, st.floats(1.0, 50.0), st.floats(0.05, 1.0))
def test_closed_form_matches_conformal_formula_off_trace(n, m, s, frac):
    # unit vector at r whose angular momentum u(r) sin(beta) equals C0, i.e. the
    # velocity of the geodesic with that C0 as it passes r
    params = SchwarzschildParams(n, m)
    prof = schwarzschild_profile(params)
    r = s * params.horizon_radius * (1 + 1e-9)
    u = float(prof.u(r))
    C0 = frac * u
    beta = math.asin(C0 / u)
    x, v = _unit_vector(params, r, beta)
    oracle = conformal_ricci_oracle(prof, x, v)
    closed = ricci_along_geodesic(params, r, C0)
    assert closed == pytest.approx(oracle, rel=1e-9, abs=1e-12 * abs(
        m * (n - 2) / r ** n))


@pytest.mark.parametrize("n", [3, 5])
def test_closed_form_along_trace(n):
    params = SchwarzschildParams(n, 1.0)
    prof = schwarzschild_profile(params)
    trace = integrate_geodesic(params, 1.3 * params.horizon_radius)
    closed = ricci_along_geodesic(params, trace.r, trace.C0)
    for i in range(0, len(trace), 7):
        st_ = trace[i]
        c, s_ = math.cos(st_.theta), math.sin(st_.theta)
        x = np.zeros(n)
        v = np.zeros(n)
        x[:2] = st_.r * c, st_.r * s_
        v[:2] = (st_.rdot * c - st_.r * st_.thetadot * s_,
                 st_.rdot * s_ + st_.r * st_.thetadot * c)
        assert closed[i] == pytest.approx(conformal_ricci_oracle(prof, x, v), rel=1e-7)


@given(dims, masses, st.floats(1.01, 20.0), st.floats(-5, 5))
def test_oracle_is_quadratic(n, m, s, c):
    params = SchwarzschildParams(n, m)
    prof = schwarzschild_profile(params)
    x, v = _unit_vector(params, s * params.horizon_radius, 0.7)
    base = conformal_ricci_oracle(prof, x, v)
    assert conformal_ricci_oracle(prof, x, c * v) == pytest.approx(
        c * c * base, rel=1e-12, abs=1e-300)


def test_oracle_decays():
    params = SchwarzschildParams(3, 1.0)
    x, v = _unit_vector(params, 1e4, 0.0)
    assert abs(conformal_ricci_oracle(schwarzschild_profile(params), x, v)) < 1e-8


def test_sign_change():
    params = SchwarzschildParams(4, 1.0)
    C0 = 2.0
    r_star = ricci_sign_change_radius(params, C0)
    w = 1 + 1 / (2 * r_star ** 2)
    assert r_star ** 2 * w ** 2 == pytest.approx(4 * C0 ** 2 / 3, rel=1e-14)
    assert ricci_along_geodesic(params, 0.99 * r_star, C0) > 0
    assert ricci_along_geodesic(params, 1.01 * r_star, C0) < 0
    assert ricci_along_geodesic(params, 1e3, C0) < 0


def test_ricci_domain():
    params = SchwarzschildParams(3, 1.0)
    with pytest.raises(DomainError):
        ricci_along_geodesic(params, 0.4, 2.0)
    with pytest.raises(DomainError):
        ricci_along_geodesic(params, 1.0, 0.0)


def _round_sphere(n):
    # e^{2phi} = 4/(1+r^2)^2, Scal = n(n-1)
    return MetricProfile(
        n=n, phi=lambda r: np.log(2 / (1 + np.asarray(r) ** 2)),
        dphi=lambda r: -2 * np.asarray(r) / (1 + np.asarray(r) ** 2),
        d2phi=lambda r: (2 * np.asarray(r) ** 2 - 2) / (1 + np.asarray(r) ** 2) ** 2,
        horizon_radius=0.1, areal_horizon=0.2)


@pytest.mark.parametrize("n", [3, 4, 6])
def test_scalar_curvature_of_round_sphere(n):
    r = np.geomspace(0.01, 100, 30)
    np.testing.assert_allclose(scalar_curvature_conformal(_round_sphere(n), r), n * (n - 1),
                               rtol=1e-12)


@given(masses, st.floats(1.0, 1e3))
def test_schwarzschild_scalar_flat(m, s):
    params = SchwarzschildParams(3, m)
    prof = schwarzschild_profile(params)
    u = s * params.areal_horizon
    assert abs(scalar_curvature_u_form(prof, u)) < 1e-9
    r = s * params.horizon_radius
    assert abs(scalar_curvature_conformal(prof, r)) < 1e-9 / m ** 2


def test_u_form_is_finite_at_horizon():
    params = SchwarzschildParams(3, 1.0)
    assert scalar_curvature_u_form(schwarzschild_profile(params), 2.0) == 0.0


def test_u_form_routes_agree_without_exact_form():
    from dataclasses import replace
    params = SchwarzschildParams(3, 1.5)
    prof = replace(schwarzschild_profile(params), u_form=None)
    u = np.geomspace(3.01, 300, 10)
    assert np.max(np.abs(scalar_curvature_u_form(prof, u))) < 1e-12


def test_u_form_dimension():
    with pytest.raises(UnsupportedDimensionError):
        scalar_curvature_u_form(schwarzschild_profile(SchwarzschildParams(4, 1.0)), 3.0)
    with pytest.raises(DomainError):
        scalar_curvature_u_form(schwarzschild_profile(SchwarzschildParams(3, 1.0)), 1.0)


def _weight(n, m):
    return lambda x: -(4 / (n - 2)) * math.log(1 + m / (2 * np.linalg.norm(x) ** (n - 2)))


@given(st.sampled_from([3, 4, 5]), st.floats(0.5, 3.0),
       st.lists(st.floats(-2, 2), min_size=5, max_size=5))
def test_bakry_emery_is_hessian_of_weight(n, m, comps):
    # flat Ric = 0, so Ric_f = Hess f with f = -log of the conformal factor
    params = SchwarzschildParams(n, m)
    x = np.array(comps[:n])
    norm = np.linalg.norm(x)
    direction = x / norm if norm > 1e-3 else np.eye(n)[0]
    x = direction * (params.horizon_radius + norm)
    H = fd_hessian(_weight(n, m), x, h=1e-4 * np.linalg.norm(x))
    E = np.eye(n)
    BE = np.array([[bakry_emery_ricci(params, x, E[i], E[j]) for j in range(n)]
                   for i in range(n)])
    np.testing.assert_allclose(BE, H, atol=1e-6 * np.max(np.abs(BE)))


@given(st.sampled_from([3, 4, 5, 7]), st.floats(0.5, 3.0), st.floats(1.0, 1e4))
def test_bakry_emery_signs(n, m, s):
    params = SchwarzschildParams(n, m)
    rho = s * params.horizon_radius
    x = np.zeros(n)
    x[0] = rho
    e_r, e_t = np.eye(n)[0], np.eye(n)[1]
    assert bakry_emery_ricci(params, x, e_r, e_r) < 0
    tangential = bakry_emery_ricci(params, x, e_t, e_t)
    assert tangential == pytest.approx(2 * m / (rho ** n * (1 + m / (2 * rho ** (n - 2)))),
                                       rel=1e-14)


@given(st.lists(st.floats(-3, 3), min_size=9, max_size=9), st.floats(-4, 4))
def test_bakry_emery_symmetric_bilinear(comps, c):
    params = SchwarzschildParams(3, 1.0)
    x, A, B = np.array(comps[:3]) + 0.7, np.array(comps[3:6]), np.array(comps[6:])
    assume(np.linalg.norm(x) > 1e-3)
    ab = bakry_emery_ricci(params, x, A, B)
    assert ab == bakry_emery_ricci(params, x, B, A)
    scale = (abs(bakry_emery_ricci(params, x, A, A)) + abs(bakry_emery_ricci(params, x, B, B))
             + 1e-300)
    assert bakry_emery_ricci(params, x, c * A, B) == pytest.approx(
        c * ab, abs=1e-12 * scale * (1 + abs(c)))
    assert bakry_emery_ricci(params, x, A + B, B) == pytest.approx(
        ab + bakry_emery_ricci(params, x, B, B), abs=1e-12 * scale * 4)


def test_bakry_emery_decay_and_origin():
    params = SchwarzschildParams(3, 1.0)
    x = np.array([1e6, 0, 0])
    for A in np.eye(3):
        assert abs(bakry_emery_ricci(params, x, A, A)) < 1e-15
    with pytest.raises(DomainError):
        bakry_emery_ricci(params, np.zeros(3), np.ones(3), np.ones(3))
