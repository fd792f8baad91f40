"""Numpy fallback for the heat-kernel quadrature kernel.

Semantics match momentflow._kernels.quadcore exactly; the triple tensor sum
is evaluated in slabs over the first axis to bound temporary memory.
"""

import numpy as np


def _envelope(r2):
    lg = np.log(np.e + r2)
    return 1.0 / ((np.e + r2) * lg * lg)


def quad_heat_kato(x, t, y1, w1, y2, w2, y3, w3, modulated, eta):
    """Heat average of the curl-type datum at point x; returns a 3-vector."""
    x = np.asarray(x, dtype=float)
    inv4t = 0.25 / t
    g1 = w1 * np.exp(-((y1 - x[0]) ** 2) * inv4t)
    g2 = w2 * np.exp(-((y2 - x[1]) ** 2) * inv4t)
    g3 = w3 * np.exp(-((y3 - x[2]) ** 2) * inv4t)
    acc1 = 0.0
    acc2 = 0.0
    # slab size keeps the (slab, n2, n3) temporaries around ~64 MB
    slab = max(1, int(64e6 / (16.0 * y2.size * y3.size)))
    for lo in range(0, y1.size, slab):
        hi = min(lo + slab, y1.size)
        ker = g1[lo:hi, None, None] * g2[None, :, None] * g3[None, None, :]
        r2 = (
            y1[lo:hi, None, None] ** 2
            + y2[None, :, None] ** 2
            + y3[None, None, :] ** 2
        )
        G = _envelope(r2)
        if modulated:
            G *= np.sin(r2)
        common = ker * G
        acc1 += float(np.sum(common * y2[None, :, None]))
        acc2 += float(np.sum(common * y1[lo:hi, None, None]))
    pref = eta * (4.0 * np.pi * t) ** (-1.5)
    return np.array([2.0 * pref * acc1, -2.0 * pref * acc2, 0.0])
