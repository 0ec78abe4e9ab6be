"""Acceptance criteria of the build, each at its stated tolerance.

Every check records a ``[PASS]``/``[FAIL]`` line through the
``acceptance_log`` fixture; the terminal summary lists one line per
criterion.  Run with ``pytest -m acceptance -s`` to see the lines inline.
"""

import itertools
import math

import numpy as np
import pytest

from schwarzlab.curvature import (bakry_emery_ricci, conformal_ricci_oracle,
                                  ricci_along_geodesic, scalar_curvature_u_form)
from schwarzlab.frankel import (R_functional, R_series_schwarzschild, alpha_form_prefactor,
                                alpha_parameter, horizon_ricci, ricci_integral_alpha_form,
                                ricci_integral_direct)
from schwarzlab.geodesic import integrate_geodesic, radial_speed_closed_form
from schwarzlab.metric import (SchwarzschildParams, f_phi, inversion_identity_residual,
                               log_grid, schwarzschild_profile)
from schwarzlab.perturbation import (PerturbationBudget, build_metric_from_f, check_theorem42,
                                     example44_profile, scalar_sign_scan,
                                     schwarzschild_profile_function)

pytestmark = pytest.mark.acceptance

DIMS = (3, 4, 5, 7)
MASSES = (0.5, 1.0, 2.0)
R0_FACTORS = (1.01, 2.0, 5.0, 10.0)
GRID = list(itertools.product(DIMS, MASSES, R0_FACTORS))
TOL = 1e-10


@pytest.fixture(scope="module")
def traces():
    out = {}
    for n, m, s in GRID:
        params = SchwarzschildParams(n, m)
        out[n, m, s] = integrate_geodesic(params, s * params.horizon_radius, tol=TOL)
    return out


@pytest.fixture(scope="module")
def example44():
    pf = example44_profile(1.0, 0.01)
    return pf, build_metric_from_f(pf, 0.5)


def _velocity(trace, i):
    r, th = trace.r[i], trace.theta[i]
    c, s = math.cos(th), math.sin(th)
    return (np.array([r * c, r * s]),
            np.array([trace.rdot[i] * c - r * trace.thetadot[i] * s,
                      trace.rdot[i] * s + r * trace.thetadot[i] * c]))


# --- 1 ---------------------------------------------------------------------------

def test_c1_geodesic_conservation(traces, acceptance_log):
    worst_a = max(t.max_arclength_residual for t in traces.values())
    worst_c = max(t.max_C_residual for t in traces.values())
    reached = all(t.r[-1] >= 1e4 * t.r0 for t in traces.values())
    ok = worst_a < 1e-8 and worst_c < 1e-8 and reached
    acceptance_log("1 geodesic conservation", f"{len(traces)} traces",
                   ok, f"arclength {worst_a:.2e}, C drift {worst_c:.2e} (< 1e-8), "
                       f"reached 1e4 r0: {reached}")
    assert ok


# --- 2 ---------------------------------------------------------------------------

def test_c2_monotone_radius_and_first_integral(traces, acceptance_log):
    monotone = all(np.all(np.diff(t.r) > 0) for t in traces.values())
    worst = 0.0
    for (n, m, _), t in traces.items():
        closed = radial_speed_closed_form(SchwarzschildParams(n, m), t.r, t.C0)
        worst = max(worst, float(np.max(np.abs(t.rdot - closed))))
    ok = monotone and worst < 1e-7
    acceptance_log("2 radial monotonicity", "all traces", ok,
                   f"strictly increasing r: {monotone}, max |rdot - closed| {worst:.2e} (< 1e-7)")
    assert ok


# --- 3 ---------------------------------------------------------------------------

def test_c3_ricci_oracle_agreement(traces, acceptance_log):
    worst, points = 0.0, 0
    for (n, m, _), t in traces.items():
        params = SchwarzschildParams(n, m)
        prof = schwarzschild_profile(params)
        closed = ricci_along_geodesic(params, t.r, t.C0)
        for i in range(len(t)):
            x2, v2 = _velocity(t, i)
            x = np.zeros(n)
            v = np.zeros(n)
            x[:2], v[:2] = x2, v2
            oracle = conformal_ricci_oracle(prof, x, v)
            worst = max(worst, abs(closed[i] - oracle) / abs(oracle))
            points += 1
    ok = worst < 1e-7
    acceptance_log("3 ricci oracle", f"{points} trace points", ok,
                   f"max relative disagreement {worst:.2e} (< 1e-7)")
    assert ok


# --- 4 ---------------------------------------------------------------------------

def test_c4_three_routes(acceptance_log):
    worst_ode, worst_quad, all_negative = 0.0, 0.0, True
    for n, m, s in GRID:
        params = SchwarzschildParams(n, m)
        r0 = s * params.horizon_radius
        ap = alpha_parameter(params, r0)
        direct = ricci_integral_direct(params, r0, tol=TOL).value
        af = alpha_form_prefactor(params, ap.C0) * ricci_integral_alpha_form(n, ap.alpha).value
        series = R_series_schwarzschild(params, ap.C0).value
        all_negative &= direct < 0 and af < 0 and series < 0
        rd = lambda a, b: abs(a - b) / max(abs(a), abs(b))  # noqa: E731
        worst_ode = max(worst_ode, rd(direct, af), rd(direct, series))
        worst_quad = max(worst_quad, rd(af, series))
    ok = all_negative and worst_ode < 1e-3 and worst_quad < 1e-6
    acceptance_log("4 three routes", f"{len(GRID)} grid points", ok,
                   f"all negative: {all_negative}, ODE pairs {worst_ode:.2e} (< 1e-3), "
                   f"quadrature vs series {worst_quad:.2e} (< 1e-6)")
    assert ok


def test_c4_horizon_constant(acceptance_log):
    exact = horizon_ricci(SchwarzschildParams(3, 1.0)) == 0.125
    worst = 0.0
    for n, m in itertools.product(DIMS, MASSES):
        params = SchwarzschildParams(n, m)
        const = (n - 2) / (2 ** (n / (n - 2)) * m ** (2 / (n - 2)))
        on_horizon = ricci_along_geodesic(params, params.horizon_radius, params.areal_horizon)
        worst = max(worst, abs(horizon_ricci(params) - const) / const,
                    abs(on_horizon - const) / const)
    ok = exact and worst < 1e-14
    acceptance_log("4 three routes", "horizon constant", ok,
                   f"n=3, m=1 gives exactly 0.125: {exact}; family reldiff {worst:.1e}")
    assert ok


# --- 5 ---------------------------------------------------------------------------

def test_c5_alpha_boundary(acceptance_log):
    at_zero = max(abs(ricci_integral_alpha_form(n, 0.0).value) for n in DIMS)
    alphas = np.round(np.arange(1, 10) / 10, 1)
    values = [ricci_integral_alpha_form(n, a).value for n in DIMS for a in alphas]
    ok = at_zero < 1e-10 and max(values) < 0
    acceptance_log("5 alpha boundary", "alpha = 0 and 0.1..0.9", ok,
                   f"|J(0)| {at_zero:.1e} (< 1e-10), max J on grid {max(values):.3e} (< 0)")
    assert ok


# --- 6 ---------------------------------------------------------------------------

def test_c6_roundtrip_schwarzschild(acceptance_log):
    worst, worst_R = 0.0, 0.0
    for n, m in itertools.product(DIMS, MASSES):
        params = SchwarzschildParams(n, m)
        R = params.horizon_radius
        built = build_metric_from_f(schwarzschild_profile_function(params), R)
        r = log_grid(R, 100 * R, 256)
        worst = max(worst, float(np.max(np.abs(built.phi(r) - schwarzschild_profile(params).phi(r)))))
        worst_R = max(worst_R, abs(built.horizon_radius - R) / R)
    ok = worst < 1e-8 and worst_R < 1e-12
    acceptance_log("6 roundtrip", "schwarzschild phi", ok,
                   f"max |phi_built - phi| {worst:.2e} (< 1e-8), horizon {worst_R:.1e}")
    assert ok


def test_c6_roundtrip_example44(example44, acceptance_log):
    pf, built = example44
    u = np.geomspace(pf.C_f * (1 + 1e-8), 1e3 * pf.C_f, 1024)
    err = float(np.max(np.abs(f_phi(built, u) - pf.f(u))))
    ok = err < 1e-8
    acceptance_log("6 roundtrip", "example profile f", ok, f"max |f_phi - f| {err:.2e} (< 1e-8)")
    assert ok


# --- 7 ---------------------------------------------------------------------------

def test_c7_conditions(example44, acceptance_log):
    _, built = example44
    params = SchwarzschildParams(3, 1.0)
    rep = check_theorem42(built, params, PerturbationBudget(1 / 16, 1 / 16, 3, 1.0),
                          u0_samples=[3.0])
    ok = rep.passed and rep.cond42_lhs == 0.5 and rep.cond42_rhs == 1.0
    acceptance_log("7 example pipeline", "perturbation conditions", ok,
                   f"passed {rep.passed}, margins {rep.cond41_margin_deriv:.2e} / "
                   f"{rep.cond41_margin_B:.2e}, cond42 {rep.cond42_lhs} < {rep.cond42_rhs}")
    assert ok


def test_c7_R_negative(example44, acceptance_log):
    _, built = example44
    u0 = np.geomspace(1.01 * built.areal_horizon, 50.0, 40)
    values = [R_functional(built, float(u)).value for u in u0]
    ok = max(values) < 0
    acceptance_log("7 example pipeline", "R negative on [1.01 C, 50m]", ok,
                   f"max R over {len(u0)} samples {max(values):.3e}")
    assert ok


def test_c7_negative_scalar_curvature_above_3m(example44, acceptance_log):
    # Expected to fail: on (3m, 4m) the correction E is decreasing, which
    # makes the scalar curvature positive there; its negative window is (4m, 6m).
    _, built = example44
    scan = scalar_sign_scan(built, (3.0, 4.0), 1000)
    negative = sum(1 for _, s in scan if s < 0)
    positive = sum(1 for _, s in scan if s > 0)
    ok = negative >= 1
    acceptance_log("7 example pipeline", "negative Scal in (3m, 4m)", ok,
                   f"{negative} negative, {positive} positive of {len(scan)} samples")
    assert ok


def test_c7_positive_scalar_curvature_far_out(example44, acceptance_log):
    _, built = example44
    scan = scalar_sign_scan(built, (20.0, 1000.0), 1000, open_interval=False)
    ok = all(s > 0 for _, s in scan)
    acceptance_log("7 example pipeline", "positive Scal for u >= 20m", ok,
                   f"{sum(s > 0 for _, s in scan)} of {len(scan)} samples positive on [20m, 1000m]")
    assert ok


def test_c7_schwarzschild_scalar_flat(acceptance_log):
    prof = schwarzschild_profile(SchwarzschildParams(3, 1.0))
    u = np.geomspace(2.0, 2e4, 2048)
    worst = float(np.max(np.abs(scalar_curvature_u_form(prof, u))))
    ok = worst < 1e-9
    acceptance_log("7 example pipeline", "schwarzschild scalar flatness", ok,
                   f"max |Scal| {worst:.1e} (< 1e-9)")
    assert ok


# --- 8 ---------------------------------------------------------------------------

def test_c8_generalized_metrics(acceptance_log):
    worst = -math.inf
    count = 0
    for (n, k), m in itertools.product([(5, 2), (7, 3)], [1.0, 2.0]):
        params = SchwarzschildParams(n, m, k)
        prof = schwarzschild_profile(params)
        for u0 in params.areal_horizon * np.geomspace(1.01, 100, 16):
            worst = max(worst, R_functional(prof, float(u0)).value)
            count += 1
    ok = worst < 0
    acceptance_log("8 generalized metrics", "(5,2), (7,3)", ok,
                   f"max R over {count} samples {worst:.3e}")
    assert ok


# --- 9 ---------------------------------------------------------------------------

def test_c9_bakry_emery(acceptance_log):
    signs_ok = True
    for n, m in itertools.product(DIMS, MASSES):
        params = SchwarzschildParams(n, m)
        E = np.eye(n)
        for rho in params.horizon_radius * np.geomspace(1.0, 1e4, 20):
            x = rho * E[0]
            signs_ok &= bakry_emery_ricci(params, x, E[0], E[0]) < 0
            signs_ok &= bakry_emery_ricci(params, x, E[1], E[1]) > 0
    params = SchwarzschildParams(3, 1.0)
    x = np.array([1e6, 0.0, 0.0])
    far = max(abs(bakry_emery_ricci(params, x, A, B)) for A in np.eye(3) for B in np.eye(3))
    ok = signs_ok and far < 1e-15
    acceptance_log("9 bakry-emery", "signs and decay", ok,
                   f"radial < 0 < tangential: {signs_ok}, max |Ric_f| at 1e6 {far:.1e} (< 1e-15)")
    assert ok


# --- 10 --------------------------------------------------------------------------

def test_c10_inversion_isometry(acceptance_log):
    rng = np.random.default_rng(20240601)
    worst = 0.0
    for n in (3, 4, 5):
        params = SchwarzschildParams(n, 1.0)
        R = params.horizon_radius
        for _ in range(1000):
            d = rng.standard_normal(n)
            rho = R * 10 ** rng.uniform(-2, 2)
            worst = max(worst, inversion_identity_residual(params, rho * d / np.linalg.norm(d)))
    ok = worst < 1e-12
    acceptance_log("10 inversion isometry", "3000 random points", ok,
                   f"max identity residual {worst:.1e} (< 1e-12)")
    assert ok
