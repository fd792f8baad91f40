# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Hot kernel: tensor-product heat-kernel quadrature of the oscillatory data.

The node count per axis grows linearly with the evaluation radius for the
modulated kind, so the triple loop below dominates far-field runs; it is
compiled with the GIL released.  momentflow._kernels.quadcore_py holds the
numpy fallback with identical semantics.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log, sin, M_E


cdef inline double _envelope(double r2) nogil:
    cdef double lg = log(M_E + r2)
    return 1.0 / ((M_E + r2) * lg * lg)


def quad_heat_kato(double[::1] x, double t,
                   double[::1] y1, double[::1] w1,
                   double[::1] y2, double[::1] w2,
                   double[::1] y3, double[::1] w3,
                   bint modulated, double eta):
    """Heat average of the curl-type datum at point x; returns a 3-vector."""
    cdef Py_ssize_t n1 = y1.shape[0], n2 = y2.shape[0], n3 = y3.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double inv4t = 0.25 / t
    cdef double g1, g12, a, b, c, r2_12, r2, ker, G, common
    cdef double acc1 = 0.0, acc2 = 0.0
    cdef double x0 = x[0], xa = x[1], xb = x[2]

    with nogil:
        for i in range(n1):
            a = y1[i] - x0
            g1 = w1[i] * exp(-a * a * inv4t)
            if g1 == 0.0:
                continue
            for j in range(n2):
                b = y2[j] - xa
                g12 = g1 * w2[j] * exp(-b * b * inv4t)
                if g12 == 0.0:
                    continue
                r2_12 = y1[i] * y1[i] + y2[j] * y2[j]
                for k in range(n3):
                    c = y3[k] - xb
                    ker = g12 * w3[k] * exp(-c * c * inv4t)
                    r2 = r2_12 + y3[k] * y3[k]
                    G = _envelope(r2)
                    if modulated:
                        G *= sin(r2)
                    common = ker * G
                    acc1 += common * y2[j]
                    acc2 += common * y1[i]

    cdef double pref = eta * (4.0 * np.pi * t) ** (-1.5)
    return np.array([2.0 * pref * acc1, -2.0 * pref * acc2, 0.0])
