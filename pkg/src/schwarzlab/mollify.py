"""Smoothing of continuous piecewise-linear functions.

A piecewise-linear function is written as a sum of ramps
``slope_change * (u - knot)_+`` and each ramp is convolved with the triweight
kernel ``K(z) = 35/32 (1 - z^2)^3`` on ``[-eps, eps]``.  Because the kernel
is symmetric with unit mass, the result equals the input away from the
knots, and value, first and second derivative are available in closed form.
The smoothed function is C^4.
"""

import numpy as np

__all__ = ["kernel", "kernel_cdf", "smoothed_ramp", "SmoothedPiecewiseLinear"]

_K = 35 / 32


def kernel(z):
    z = np.asarray(z, float)
    return np.where(np.abs(z) < 1, _K * (1 - z * z) ** 3, 0.0)


def kernel_cdf(z):
    z = np.clip(np.asarray(z, float), -1.0, 1.0)
    return _K * (z - z ** 3 + 0.6 * z ** 5 - z ** 7 / 7) + 0.5


def _first_moment(z):
    # int_{-1}^{z} t K(t) dt
    z = np.clip(np.asarray(z, float), -1.0, 1.0)
    z2 = z * z
    return _K * (z2 / 2 - 3 * z2 ** 2 / 4 + z2 ** 3 / 2 - z2 ** 4 / 8 - 1 / 8)


def smoothed_ramp(z):
    """``(K * max(., 0))(z)`` in kernel units; 0 for z <= -1, z for z >= 1."""
    z = np.asarray(z, float)
    inner = z * kernel_cdf(z) - _first_moment(z)
    return np.where(z <= -1, 0.0, np.where(z >= 1, z, inner))


class SmoothedPiecewiseLinear:
    """``base + sum_i dslope_i * (u - knot_i)_+``, convolved with width ``eps``."""

    def __init__(self, knots, slope_changes, eps, base=0.0):
        self.knots = np.asarray(knots, float)
        self.slope_changes = np.asarray(slope_changes, float)
        self.eps = float(eps)
        self.base = float(base)

    def _z(self, u):
        u = np.asarray(u, float)
        return (u[..., None] - self.knots) / self.eps

    def raw(self, u):
        u = np.asarray(u, float)
        return self.base + np.sum(self.slope_changes * np.maximum(u[..., None] - self.knots, 0), -1)

    def __call__(self, u):
        return self.base + self.eps * np.sum(self.slope_changes * smoothed_ramp(self._z(u)), -1)

    def derivative(self, u):
        return np.sum(self.slope_changes * kernel_cdf(self._z(u)), -1)

    def second_derivative(self, u):
        return np.sum(self.slope_changes * kernel(self._z(u)), -1) / self.eps
