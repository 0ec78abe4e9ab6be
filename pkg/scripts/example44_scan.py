"""Mixed-sign example: condition margins, R(u0) and the scalar-curvature sign profile.

    python3 scripts/example44_scan.py --m 1 --eps 0.01
"""

import argparse
import json
from dataclasses import asdict, dataclass

import numpy as np

from schwarzlab.curvature import scalar_curvature_u_form
from schwarzlab.frankel import R_functional
from schwarzlab.metric import SchwarzschildParams
from schwarzlab.perturbation import (PerturbationBudget, build_metric_from_f, check_theorem42,
                                     example44_profile, scalar_sign_scan)


@dataclass
class ScanConfig:
    m: float = 1.0
    eps: float = 0.01
    scal_samples: int = 1000
    u0_samples: int = 40


def sign_runs(scan):
    """Collapse a sign scan into maximal runs ``(sign, u_first, u_last)``."""
    runs = []
    for u, s in scan:
        if runs and runs[-1][0] == s:
            runs[-1][2] = u
        else:
            runs.append([s, u, u])
    return [tuple(r) for r in runs]


def run(cfg: ScanConfig):
    m = cfg.m
    pf = example44_profile(m, cfg.eps)
    built = build_metric_from_f(pf, m / 2)
    params = SchwarzschildParams(3, m)
    rep = check_theorem42(built, params, PerturbationBudget(m * m / 16, m * m / 16, 3, m),
                          u0_samples=[])
    u0 = np.geomspace(1.01 * pf.C_f, 50 * m, cfg.u0_samples)
    R = [R_functional(built, float(u)).value for u in u0]
    scan = scalar_sign_scan(built, (2 * m, 30 * m), cfg.scal_samples)
    u = np.array([x for x, _ in scan])
    scal = scalar_curvature_u_form(built, u)
    return {
        "config": asdict(cfg),
        "cond41_margin_deriv": rep.cond41_margin_deriv,
        "cond41_margin_B": rep.cond41_margin_B,
        "cond42": [rep.cond42_lhs, rep.cond42_rhs],
        "passed": rep.passed,
        "R_max": max(R),
        "R": [[float(a), b] for a, b in zip(u0, R)],
        "scal_sign_runs_over_m": [(s, a / m, b / m) for s, a, b in sign_runs(scan)],
        "scal_min": [float(u[np.argmin(scal)]), float(np.min(scal))],
        "scal_max": [float(u[np.argmax(scal)]), float(np.max(scal))],
    }


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=None, help="smoothing half-width (default m/100)")
    p.add_argument("--samples", type=int, default=1000)
    a = p.parse_args()
    cfg = ScanConfig(m=a.m, eps=a.m / 100 if a.eps is None else a.eps, scal_samples=a.samples)
    res = run(cfg)
    print(json.dumps({k: v for k, v in res.items() if k != "R"}, indent=2))


if __name__ == "__main__":
    main()
