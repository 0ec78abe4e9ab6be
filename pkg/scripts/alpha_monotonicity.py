"""Alpha-form integral J_n(alpha) on a fine grid: sign, monotonicity and blow-up near 1.

    python3 scripts/alpha_monotonicity.py --n 3,4,5,7,10 --points 400
"""

import argparse
from dataclasses import dataclass, field

import numpy as np

from schwarzlab.frankel import ricci_integral_alpha_form


@dataclass
class AlphaConfig:
    dims: list = field(default_factory=lambda: [3, 4, 5, 7, 10])
    points: int = 400
    # 1 - alpha runs down to this value on the log-spaced part of the grid
    closest: float = 1e-8


def grid(cfg: AlphaConfig):
    lin = np.linspace(0.0, 0.99, cfg.points // 2)
    near = 1 - np.geomspace(1e-2, cfg.closest, cfg.points - cfg.points // 2)
    return np.unique(np.concatenate([lin, near]))


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=lambda s: [int(x) for x in s.split(",")], default=None)
    p.add_argument("--points", type=int, default=400)
    a = p.parse_args()
    cfg = AlphaConfig(points=a.points)
    cfg.dims = a.n or cfg.dims
    alphas = grid(cfg)
    print("n,J(0),max_J_for_alpha>0,strictly_decreasing,J(1-1e-8)")
    for n in cfg.dims:
        J = np.array([ricci_integral_alpha_form(n, float(x)).value for x in alphas])
        decreasing = bool(np.all(np.diff(J) < 0))
        print(f"{n},{J[0]:.3e},{J[1:].max():.6e},{decreasing},{J[-1]:.6e}")


if __name__ == "__main__":
    main()
