"""Radial Fourier-space bump envelopes.

A profile is a smooth nonnegative radial function supported in the closed
unit ball of frequency space.  Profiles are normalized so that the physical
field they generate carries squared L2 mass 1/d; with the transform
convention f_hat(xi) = int f(x) exp(-i xi.x) dx used throughout the package
this reads

    (2 pi)^(-d) * int |phi_hat(|xi|)|^2 dxi = 1/d.

Keeping the Plancherel factor inside the normalization is what makes the
small-dilation limit of the velocity-correlation integrals come out with
constant exactly one (see the math-to-code notes in the README).
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .errors import InvalidProfileError

SPHERE_SURFACE = {2: 2.0 * np.pi, 3: 4.0 * np.pi}


def _smooth_bump(r):
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    inside = np.abs(r) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - r[inside] ** 2))
    return out


def _gaussian_bump(r):
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    inside = np.abs(r) < 1.0
    out[inside] = np.exp(-(r[inside] ** 2) / (1.0 - r[inside] ** 2))
    return out


RAW_PROFILES: dict[str, Callable] = {
    "smooth-bump": _smooth_bump,
    "gaussian-bump": _gaussian_bump,
}


@dataclass(frozen=True)
class BumpProfile:
    """Normalized radial envelope.

    ``radial`` is the raw (unnormalized) profile; calling the object returns
    ``normalization * radial(r)``.
    """

    radial: Callable
    normalization: float
    dimension: int
    name: str = "custom"

    def __call__(self, r):
        return self.normalization * self.radial(r)

    def at_zero(self) -> float:
        return float(self.normalization * self.radial(0.0))

    def squared_mass(self) -> float:
        """(2 pi)^(-d)-weighted squared mass; 1/d by construction."""
        d = self.dimension
        integrand = lambda r: r ** (d - 1) * float(self(r)) ** 2
        val, _ = quad(integrand, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)
        return SPHERE_SURFACE[d] * val / (2.0 * np.pi) ** d


def normalize_profile(raw: Callable, dimension: int, name: str = "custom") -> BumpProfile:
    """Scale ``raw`` so the profile carries squared mass 1/d.

    ``raw`` must be smooth, nonnegative and vanish for r >= 1; the scaling
    constant is computed by adaptive radial quadrature.
    """
    if dimension not in (2, 3):
        raise ValueError(f"dimension must be 2 or 3, got {dimension}")
    probe = np.linspace(0.0, 1.2, 241)
    vals = np.asarray(raw(probe), dtype=float)
    if np.any(vals < 0.0):
        raise InvalidProfileError("raw profile takes negative values")
    if np.any(vals[probe >= 1.0] != 0.0):
        raise InvalidProfileError("raw profile must vanish for r >= 1")
    integrand = lambda r: r ** (dimension - 1) * float(raw(r)) ** 2
    mass, _ = quad(integrand, 0.0, 1.0, epsabs=1e-15, epsrel=1e-13, limit=200)
    mass *= SPHERE_SURFACE[dimension]
    if mass <= 0.0:
        raise InvalidProfileError("raw profile is identically zero")
    target = (2.0 * np.pi) ** dimension / dimension
    return BumpProfile(
        radial=raw,
        normalization=float(np.sqrt(target / mass)),
        dimension=dimension,
        name=name,
    )


def get_profile(name: str, dimension: int) -> BumpProfile:
    try:
        raw = RAW_PROFILES[name]
    except KeyError:
        raise InvalidProfileError(
            f"unknown profile {name!r}; available: {sorted(RAW_PROFILES)}"
        ) from None
    return normalize_profile(raw, dimension, name=name)
