"""Command-line front end: parameter sweeps with CSV or JSON output.

Every subcommand evaluates one row per grid point (the Cartesian product of
the comma-separated lists, in input order) and exits with status 1 when any
row fails its negativity or consistency check, 2 on usage errors.
"""

import argparse
import csv
import io
import itertools
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .curvature import (bakry_emery_ricci, conformal_ricci_oracle, ricci_along_geodesic,
                        ricci_sign_change_radius, scalar_curvature_u_form)
from .errors import SchwarzlabError
from .frankel import (R_functional, R_series_schwarzschild, alpha_form_prefactor,
                      alpha_parameter, ricci_integral_alpha_form, ricci_integral_direct)
from .geodesic import integrate_geodesic
from .metric import SchwarzschildParams, areal_coordinate, f_phi, schwarzschild_profile
from .perturbation import (PerturbationBudget, build_metric_from_f, check_theorem42,
                           example44_profile, load_tabulated_profile, scalar_sign_scan,
                           schwarzschild_profile_function)

SCHEMA_VERSION = 1
FRANKEL_HEADER = ["n", "m", "k", "r0", "u0", "alpha", "R_direct", "R_alpha_form", "R_series",
                  "max_pairwise_reldiff", "negative"]
# agreement required between routes: any pair involving the ODE, quadrature vs series
ODE_RTOL = 1e-3
QUAD_RTOL = 1e-6
CONSERVATION_TOL = 1e-8
ORACLE_RTOL = 1e-7
ROUNDTRIP_TOL = 1e-8


class UsageError(Exception):
    pass


def _fmt(x):
    """Shortest round-trip text for floats, lowercase booleans, '' for None."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _json_safe(x):
    if isinstance(x, dict):
        return {k: _json_safe(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_safe(v) for v in x]
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, np.integer):
        return int(x)
    return x


def _reldiff(a, b):
    return abs(a - b) / max(abs(a), abs(b))


# --- row workers (top level so they pickle for --jobs) --------------------------

def _geodesic_row(job):
    n, m, k, r0, relative, tol = job
    params = SchwarzschildParams(n, m, k)
    r0 = r0 * params.horizon_radius if relative else r0
    trace = integrate_geodesic(params, r0, tol=tol)
    monotone = bool(trace.on_horizon or np.all(np.diff(trace.r) > 0))
    ok = (trace.max_arclength_residual < CONSERVATION_TOL
          and trace.max_C_residual < CONSERVATION_TOL and monotone)
    return {
        "n": n, "m": m, "k": k, "r0": r0, "C0": trace.C0, "steps": len(trace) - 1,
        "s_end": float(trace.s[-1]), "r_end": float(trace.r[-1]),
        "max_arclength_residual": trace.max_arclength_residual,
        "max_C_residual": trace.max_C_residual, "monotone": monotone, "ok": ok,
    }


def _ricci_row(job):
    n, m, k, r0, relative, tol = job
    params = SchwarzschildParams(n, m, k)
    r0 = r0 * params.horizon_radius if relative else r0
    trace = integrate_geodesic(params, r0, tol=tol)
    profile = schwarzschild_profile(params)
    closed = ricci_along_geodesic(params, trace.r, trace.C0)
    worst = 0.0
    for i in range(len(trace)):
        r, th = trace.r[i], trace.theta[i]
        x = np.zeros(n)
        v = np.zeros(n)
        x[:2] = r * math.cos(th), r * math.sin(th)
        # velocity in flat components from (rdot, thetadot)
        v[:2] = (trace.rdot[i] * math.cos(th) - r * trace.thetadot[i] * math.sin(th),
                 trace.rdot[i] * math.sin(th) + r * trace.thetadot[i] * math.cos(th))
        if r <= params.horizon_radius:
            continue
        oracle = conformal_ricci_oracle(profile, x, v)
        worst = max(worst, abs(closed[i] - oracle) / max(abs(oracle), 1e-300))
    return {
        "n": n, "m": m, "k": k, "r0": r0, "C0": trace.C0,
        "ricci_at_r0": float(closed[0]),
        "sign_change_radius": ricci_sign_change_radius(params, trace.C0),
        "max_oracle_reldiff": worst, "ok": worst < ORACLE_RTOL,
    }


def _frankel_row(job):
    n, m, k, r0, u0, relative, tol = job
    params = SchwarzschildParams(n, m, k)
    row = dict.fromkeys(FRANKEL_HEADER)
    row.update(n=n, m=m, k=k)
    if k != 1:
        # only the areal-coordinate functional applies to the generalized metrics
        profile = schwarzschild_profile(params)
        if u0 is None:
            r0 = r0 * params.horizon_radius if relative else r0
            u0 = float(profile.u(r0))
            row["r0"] = r0
        else:
            u0 = u0 * params.areal_horizon if relative else u0
        value = R_functional(profile, u0, tol=tol).value
        row.update(u0=u0, R_alpha_form=value, negative=value < 0)
        return row, True
    if u0 is not None:
        u0 = u0 * params.areal_horizon if relative else u0
        r0 = float(areal_coordinate(schwarzschild_profile(params), check=False).r_of_u(u0))
    else:
        r0 = r0 * params.horizon_radius if relative else r0
    ap = alpha_parameter(params, r0)
    row.update(r0=r0, u0=ap.C0, alpha=ap.alpha)
    direct = ricci_integral_direct(params, r0, tol=tol).value
    row["R_direct"] = direct
    if ap.alpha >= 1:
        row["negative"] = direct < 0
        return row, True
    af = alpha_form_prefactor(params, ap.C0) * ricci_integral_alpha_form(n, ap.alpha, tol).value
    series = R_series_schwarzschild(params, ap.C0).value
    row.update(R_alpha_form=af, R_series=series)
    pairs = {(direct, af): ODE_RTOL, (direct, series): ODE_RTOL, (af, series): QUAD_RTOL}
    diffs = {p: _reldiff(*p) for p in pairs}
    row["max_pairwise_reldiff"] = max(diffs.values())
    row["negative"] = direct < 0 and af < 0 and series < 0
    consistent = all(diffs[p] <= tol_p for p, tol_p in pairs.items())
    return row, consistent


def _bakry_emery_row(job):
    n, m, k, rho, relative = job
    params = SchwarzschildParams(n, m, k)
    rho = rho * params.horizon_radius if relative else rho
    x = np.zeros(n)
    x[0] = rho
    e_r = np.zeros(n)
    e_r[0] = 1.0
    e_t = np.zeros(n)
    e_t[1] = 1.0
    radial = bakry_emery_ricci(params, x, e_r, e_r)
    tangential = bakry_emery_ricci(params, x, e_t, e_t)
    ok = radial < 0 < tangential
    return {"n": n, "m": m, "k": k, "rho": rho, "radial": radial, "tangential": tangential,
            "radial_negative": radial < 0, "tangential_positive": tangential > 0, "ok": ok}


# --- argument handling -----------------------------------------------------------

def _list(kind):
    def parse(text):
        items = [t.strip() for t in text.split(",") if t.strip()]
        try:
            return [kind(t) for t in items]
        except ValueError:
            raise argparse.ArgumentTypeError(
                f"not a comma-separated list of {kind.__name__}: {text!r}")
    return parse


def _positive(text):
    val = float(text)
    if not val > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return val


def _nonnegative(text):
    val = float(text)
    if not val >= 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative: {text!r}")
    return val


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=_list(int), default=[3], help="dimensions, e.g. 3,4,5")
    common.add_argument("--m", type=_list(float), default=[1.0], help="masses")
    common.add_argument("--k", type=_list(int), default=[1], help="generalization exponents")
    common.add_argument("--tol", type=_positive, default=1e-10)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default="-", help="output path ('-' for stdout)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")

    radii = argparse.ArgumentParser(add_help=False)
    radii.add_argument("--r0", type=_list(float), default=None,
                       help="start radii (multiples of the horizon radius unless --absolute)")
    radii.add_argument("--u0", type=_list(float), default=None,
                       help="areal radii (multiples of C_phi unless --absolute)")
    radii.add_argument("--absolute", action="store_true",
                       help="read --r0/--u0 as absolute values")

    profile = argparse.ArgumentParser(add_help=False)
    profile.add_argument("--profile", default=None,
                         help="two-column (u, f) table; default is the mixed-sign example")
    profile.add_argument("--metric", choices=("example44", "schwarzschild"), default="example44",
                         help="built-in profile used when --profile is absent")
    profile.add_argument("--smoothing-width", type=_positive, default=None)
    profile.add_argument("--R-f", dest="R_f", type=_positive, default=None,
                         help="horizon radius of the built metric (default (m/2)^(1/(n-2)))")

    p = argparse.ArgumentParser(prog="schwarzlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("geodesic", parents=[common, radii],
                   help="integrate perpendicular geodesics and report conservation")
    sub.add_parser("ricci", parents=[common, radii],
                   help="closed-form Ricci along geodesics vs the conformal oracle")
    sub.add_parser("frankel-sweep", parents=[common, radii],
                   help="Ricci integral by three routes")
    pb = sub.add_parser("perturb-build", parents=[common, profile],
                        help="build a metric from a profile function and tabulate it")
    pb.add_argument("--samples", type=int, default=64)
    pc = sub.add_parser("perturb-check", parents=[common, profile, radii],
                        help="check perturbation hypotheses and sample R")
    pc.add_argument("--a", type=_nonnegative, default=None, help="default m^2/16")
    pc.add_argument("--b", type=_nonnegative, default=None, help="default m^2/16")
    ps = sub.add_parser("scal-scan", parents=[common, profile],
                        help="sign of the scalar curvature (n = 3)")
    ps.add_argument("--u-min", type=_positive, required=True)
    ps.add_argument("--u-max", type=_positive, required=True)
    ps.add_argument("--samples", type=int, default=100)
    sub.add_parser("bakry-emery", parents=[common, radii],
                   help="radial and tangential Bakry-Emery Ricci at |x| = r0")
    return p


def _grid(args, *lists):
    for name in lists:
        if not getattr(args, name):
            raise UsageError(f"--{name} grid is empty")
    return list(itertools.product(*(getattr(args, name) for name in lists)))


def _map(fn, jobs, workers):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_guarded, [fn] * len(jobs), jobs))
    return [_guarded(fn, j) for j in jobs]


def _guarded(fn, job):
    try:
        return fn(job), None
    except (SchwarzlabError, ArithmeticError) as exc:
        return None, f"{type(exc).__name__}: {exc}"


def _load_profile(args, m, n):
    if args.profile:
        pf = load_tabulated_profile(args.profile, n=n)
    elif args.metric == "schwarzschild":
        pf = schwarzschild_profile_function(SchwarzschildParams(n, m))
    else:
        if n != 3:
            raise UsageError("the built-in mixed-sign example is 3-dimensional")
        pf = example44_profile(m, args.smoothing_width)
    R_f = args.R_f if args.R_f is not None else (m / 2) ** (1 / (n - 2))
    return pf, build_metric_from_f(pf, R_f)


def _radial_values(args, default):
    if args.r0 is not None and args.u0 is not None:
        raise UsageError("give either --r0 or --u0, not both")
    return args.r0 if args.r0 is not None else default


# --- commands ---------------------------------------------------------------------

def _cmd_geodesic(args, fn=_geodesic_row):
    r0s = _radial_values(args, [1.01, 2.0, 5.0, 10.0])
    if args.u0 is not None:
        raise UsageError("this command takes --r0")
    args.r0 = r0s
    jobs = [(n, m, k, r0, not args.absolute, args.tol)
            for n, m, k, r0 in _grid(args, "n", "m", "k", "r0")]
    return _collect(_map(fn, jobs, args.jobs), jobs)


def _collect(results, jobs):
    rows, ok = [], True
    for job, (row, err) in zip(jobs, results):
        if err is not None:
            row = {"job": repr(job), "error": err, "ok": False}
        ok &= bool(row.get("ok", False))
        rows.append(row)
    return rows, ok


def _cmd_ricci(args):
    return _cmd_geodesic(args, fn=_ricci_row)


def _cmd_frankel(args):
    if args.r0 is not None and args.u0 is not None:
        raise UsageError("give either --r0 or --u0, not both")
    use_u0 = args.u0 is not None
    if not use_u0 and args.r0 is None:
        args.r0 = [1.1, 2.0, 5.0]
    radial = "u0" if use_u0 else "r0"
    jobs = [(n, m, k, None if use_u0 else x, x if use_u0 else None, not args.absolute, args.tol)
            for n, m, k, x in _grid(args, "n", "m", "k", radial)]
    rows, ok = [], True
    for job, (res, err) in zip(jobs, _map(_frankel_row, jobs, args.jobs)):
        if err is not None:
            row = dict.fromkeys(FRANKEL_HEADER)
            row.update(n=job[0], m=job[1], k=job[2], r0=job[3], u0=job[4], negative=False)
            print(f"schwarzlab: row {job[:5]} failed: {err}", file=sys.stderr)
            ok = False
        else:
            row, consistent = res
            ok &= bool(row["negative"]) and consistent
        rows.append(row)
    return rows, ok


def _cmd_perturb_build(args):
    rows, ok = [], True
    for n, m in _grid(args, "n", "m"):
        pf, profile = _load_profile(args, m, n)
        R = profile.horizon_radius
        r = np.geomspace(R, 100 * R, args.samples)
        u = profile.u(r)
        f = pf.f(u)
        err = np.abs(f_phi(profile, u) - f)
        for i in range(len(r)):
            rows.append({"n": n, "m": m, "r": r[i], "u": u[i], "phi": float(profile.phi(r[i])),
                         "dphi": float(profile.dphi(r[i])), "d2phi": float(profile.d2phi(r[i])),
                         "f": f[i], "roundtrip_error": err[i]})
        ok &= bool(np.max(err) <= ROUNDTRIP_TOL)
    return rows, ok


def _cmd_perturb_check(args):
    reports, rows, ok = [], [], True
    for n, m in _grid(args, "n", "m"):
        params = SchwarzschildParams(n, m)
        pf, profile = _load_profile(args, m, n)
        a = m * m / 16 if args.a is None else args.a
        b = m * m / 16 if args.b is None else args.b
        u0 = None
        if args.u0 is not None:
            u0 = [x * profile.areal_horizon if not args.absolute else x for x in args.u0]
        elif args.r0 is not None:
            raise UsageError("perturb-check samples R at --u0 values")
        rep = check_theorem42(profile, params, PerturbationBudget(a, b, n, m), u0_samples=u0,
                              tol=args.tol)
        d = rep.to_dict()
        d.update(n=n, m=m, profile=pf.label)
        reports.append(d)
        good = rep.passed and rep.R_all_negative
        ok &= good
        rows.append({"n": n, "m": m, "a": a, "b": b,
                     "cond41_margin_deriv": rep.cond41_margin_deriv,
                     "cond41_margin_B": rep.cond41_margin_B, "cond42_lhs": rep.cond42_lhs,
                     "cond42_rhs": rep.cond42_rhs,
                     "R_max": max(v for _, v in rep.R_samples),
                     "R_all_negative": rep.R_all_negative, "passed": rep.passed})
    return (rows, reports), ok


def _cmd_scal_scan(args):
    rows = []
    for n, m in _grid(args, "n", "m"):
        if n != 3:
            raise UsageError("scal-scan is for n = 3")
        _, profile = _load_profile(args, m, n)
        if args.samples < 1 or not args.u_max > args.u_min:
            raise UsageError("need --samples >= 1 and --u-max > --u-min")
        scan = scalar_sign_scan(profile, (args.u_min, args.u_max), args.samples,
                                open_interval=False)
        values = np.atleast_1d(scalar_curvature_u_form(profile, np.array([u for u, _ in scan])))
        rows += [{"n": n, "m": m, "u": u, "scal": v, "sign": s}
                 for (u, s), v in zip(scan, values)]
    return rows, True


def _cmd_bakry_emery(args):
    if args.u0 is not None:
        raise UsageError("this command takes --r0")
    if args.r0 is None:
        args.r0 = [1.0, 10.0, 2e6]
    jobs = [(*g, not args.absolute) for g in _grid(args, "n", "m", "k", "r0")]
    return _collect(_map(_bakry_emery_row, jobs, args.jobs), jobs)


COMMANDS = {
    "geodesic": _cmd_geodesic, "ricci": _cmd_ricci, "frankel-sweep": _cmd_frankel,
    "perturb-build": _cmd_perturb_build, "perturb-check": _cmd_perturb_check,
    "scal-scan": _cmd_scal_scan, "bakry-emery": _cmd_bakry_emery,
}


def _render(command, payload, fmt):
    reports = None
    if command == "perturb-check":
        payload, reports = payload
    if fmt == "json":
        doc = {"schema_version": SCHEMA_VERSION, "command": command, "version": __version__}
        if reports is not None:
            doc["reports"] = reports
        else:
            doc["rows"] = payload
        return json.dumps(_json_safe(doc), indent=2) + "\n"
    header = FRANKEL_HEADER if command == "frankel-sweep" else _union_keys(payload)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in payload:
        writer.writerow([_fmt(row.get(h)) for h in header])
    return buf.getvalue()


def _union_keys(rows):
    keys = []
    for row in rows:
        keys += [k for k in row if k not in keys]
    return keys


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1:
        parser.error("--jobs must be >= 1")
    try:
        payload, ok = COMMANDS[args.command](args)
    except UsageError as exc:
        parser.error(str(exc))
    except (SchwarzlabError, ArithmeticError) as exc:
        print(f"schwarzlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    text = _render(args.command, payload, args.format)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
