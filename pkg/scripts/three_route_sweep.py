"""Ricci integral by ODE, alpha-form quadrature and series over a parameter grid.

    python3 scripts/three_route_sweep.py --n 3,4,5,7 --m 0.5,1,2 --out routes.csv
"""

import argparse
import csv
import itertools
import sys
import time
from dataclasses import dataclass, field

from schwarzlab.frankel import (R_series_schwarzschild, alpha_form_prefactor, alpha_parameter,
                                ricci_integral_alpha_form, ricci_integral_direct)
from schwarzlab.metric import SchwarzschildParams


@dataclass
class SweepConfig:
    dims: list = field(default_factory=lambda: [3, 4, 5, 7])
    masses: list = field(default_factory=lambda: [0.5, 1.0, 2.0])
    r0_factors: list = field(default_factory=lambda: [1.01, 1.1, 2.0, 5.0, 10.0])
    tol: float = 1e-10


def sweep(cfg: SweepConfig):
    for n, m, s in itertools.product(cfg.dims, cfg.masses, cfg.r0_factors):
        params = SchwarzschildParams(n, m)
        r0 = s * params.horizon_radius
        ap = alpha_parameter(params, r0)
        t0 = time.perf_counter()
        direct = ricci_integral_direct(params, r0, tol=cfg.tol).value
        t1 = time.perf_counter()
        af = alpha_form_prefactor(params, ap.C0) * ricci_integral_alpha_form(n, ap.alpha).value
        t2 = time.perf_counter()
        series = R_series_schwarzschild(params, ap.C0)
        t3 = time.perf_counter()
        yield {"n": n, "m": m, "r0_over_R": s, "alpha": ap.alpha, "direct": direct,
               "alpha_form": af, "series": series.value, "series_terms": series.terms_used,
               "rel_direct_series": abs(direct - series.value) / abs(series.value),
               "rel_alpha_series": abs(af - series.value) / abs(series.value),
               "t_direct": t1 - t0, "t_alpha": t2 - t1, "t_series": t3 - t2}


def main():
    floats = lambda s: [float(x) for x in s.split(",")]  # noqa: E731
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=lambda s: [int(x) for x in s.split(",")], default=None)
    p.add_argument("--m", type=floats, default=None)
    p.add_argument("--r0", type=floats, default=None, help="multiples of the horizon radius")
    p.add_argument("--out", default="-")
    a = p.parse_args()
    cfg = SweepConfig()
    cfg.dims = a.n or cfg.dims
    cfg.masses = a.m or cfg.masses
    cfg.r0_factors = a.r0 or cfg.r0_factors
    fh = sys.stdout if a.out == "-" else open(a.out, "w", newline="")
    writer = None
    for row in sweep(cfg):
        if writer is None:
            writer = csv.DictWriter(fh, fieldnames=list(row), lineterminator="\n")
            writer.writeheader()
        writer.writerow(row)
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
