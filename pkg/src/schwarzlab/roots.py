"""Inversion of strictly increasing functions on a bracket.

Safeguarded Newton: every iterate keeps a sign-change bracket, Newton steps
that leave it are replaced by bisection.  Works elementwise on arrays so a
whole grid is inverted in one sweep.
"""

import numpy as np

from .errors import DomainError

__all__ = ["invert_increasing"]


def invert_increasing(fun, target, lo, hi, dfun=None, *, xtol=4e-16, maxiter=200,
                      max_grow=200):
    """Solve ``fun(x) = target`` for strictly increasing ``fun``.

    Parameters
    ----------
    fun, dfun : callable
        Vectorized function and (optional) derivative.
    target : float or array
    lo, hi : float or array
        Initial bracket.  ``fun(lo) <= target`` is required; ``hi`` is moved
        outward geometrically (away from ``lo``) until ``fun(hi) >= target``.
    xtol : float
        Relative tolerance on ``x``.

    Returns
    -------
    float or ndarray, matching the broadcast shape of the inputs.
    """
    scalar = np.ndim(target) == 0 and np.ndim(lo) == 0 and np.ndim(hi) == 0
    y, a, b = (np.array(v, dtype=float, copy=True) for v in np.broadcast_arrays(target, lo, hi))
    y, a, b = np.atleast_1d(y), np.atleast_1d(a), np.atleast_1d(b)

    fa = fun(a) - y
    if np.any(fa > 0):
        raise DomainError("target lies below the bracket: fun(lo) > target")
    fb = fun(b) - y
    for _ in range(max_grow):
        short = fb < 0
        if not short.any():
            break
        width = b[short] - a[short]
        a[short], fa[short] = b[short], fb[short]
        b[short] = b[short] + 2.0 * width
        fb[short] = fun(b[short]) - y[short]
    else:
        raise DomainError("could not bracket the target; function may be bounded")

    x = np.where(fa == 0, a, np.where(fb == 0, b, 0.5 * (a + b)))
    done = (fa == 0) | (fb == 0)
    for _ in range(maxiter):
        if done.all():
            break
        fx = fun(x) - y
        below = fx < 0
        a = np.where(below, x, a)
        b = np.where(below, b, x)
        done |= fx == 0
        if dfun is not None:
            with np.errstate(divide="ignore", invalid="ignore"):
                step = fx / dfun(x)
                xn = x - step
            ok = np.isfinite(xn) & (xn > a) & (xn < b)
            xn = np.where(ok, xn, 0.5 * (a + b))
        else:
            xn = 0.5 * (a + b)
        scale = np.maximum(np.abs(xn), np.finfo(float).tiny)
        converged = (np.abs(xn - x) <= xtol * scale) | ((b - a) <= xtol * scale)
        x = np.where(done, x, xn)
        done |= converged
    return float(x[0]) if scalar else x.reshape(np.broadcast(target, lo, hi).shape)
