"""Quadrature and fitting helpers used across modules.

All rules here are deterministic fixed-order rules; resolution is a knob,
never adaptive state.
"""

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def gauss_legendre(n: int):
    """Nodes and weights on [-1, 1], cached."""
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def gauss_legendre_interval(a: float, b: float, n: int):
    x, w = gauss_legendre(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * x, half * w


def tensor_ball_nodes(center, radius: float, n: int):
    """Tensor Gauss-Legendre nodes/weights on the bounding box of B(center, radius).

    Returns (points, weights) with points of shape (n**d, d).  The integrand is
    expected to vanish outside the ball, so the box extension is exact.
    """
    center = np.asarray(center, dtype=float)
    d = center.size
    axes, wts = [], []
    for i in range(d):
        x, w = gauss_legendre_interval(center[i] - radius, center[i] + radius, n)
        axes.append(x)
        wts.append(w)
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    wgrid = wts[0]
    for w in wts[1:]:
        wgrid = np.multiply.outer(wgrid, w)
    return pts, wgrid.ravel()


def simpson_weights(m: int, h: float):
    """Composite Simpson weights for m panels (m even) of width h."""
    if m % 2 != 0:
        raise ValueError("composite Simpson needs an even panel count")
    w = np.ones(m + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (h / 3.0)


def simpson_any_weights(n_points: int, h: float):
    """Simpson-type weights for n_points uniform samples (n_points >= 2).

    Even panel counts use plain composite Simpson; odd counts (>= 3 panels)
    finish with a 3/8 panel so fourth order holds on every prefix of a
    uniform grid.  One panel falls back to the trapezoid.
    """
    m = n_points - 1
    if m < 1:
        raise ValueError("need at least two samples")
    if m == 1:
        return np.array([0.5, 0.5]) * h
    w = np.zeros(n_points)
    if m % 2 == 0:
        w[:] = simpson_weights(m, h)
    else:
        if m > 3:
            w[: m - 2] = simpson_weights(m - 3, h)
        w[m - 3 :] += np.array([1.0, 3.0, 3.0, 1.0]) * (3.0 * h / 8.0)
    return w


def cumulative_trapezoid(y, x):
    """Cumulative trapezoid matching scipy's convention, first entry 0."""
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(y)
    out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(x))
    return out


def loglog_slope(radii, magnitudes, log_magnitudes=None):
    """Least-squares slope of log|f| against log r.

    ``log_magnitudes`` may be passed directly for values too small to
    represent; entries with nonpositive magnitude are excluded.  Returns
    (slope, used_mask).
    """
    r = np.asarray(radii, dtype=float)
    if log_magnitudes is None:
        mags = np.asarray(magnitudes, dtype=float)
        mask = mags > 0.0
        logm = np.full_like(mags, -np.inf)
        logm[mask] = np.log(mags[mask])
    else:
        logm = np.asarray(log_magnitudes, dtype=float)
        mask = np.isfinite(logm)
    if mask.sum() < 2:
        raise ValueError("fewer than two usable samples for a slope fit")
    slope = np.polyfit(np.log(r[mask]), logm[mask], 1)[0]
    return float(slope), mask
