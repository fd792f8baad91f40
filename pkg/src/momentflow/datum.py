"""Oscillating divergence-free initial data.

The datum is eta * curl(psi) where psi is a sum of modulated, dilated copies
of a single radial Fourier bump.  In frequency space each term j contributes
bumps of width delta centered on the orbit of alpha_j under negation and the
cyclic index map; the curl appears as an explicit polynomial prefactor, so
divergence-freeness is exact and the rotational symmetry

    a_tilde(x) = a(x_tilde)

holds by construction.
"""

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import SpecValidationError, SupportOverlapError
from .profiles import BumpProfile, get_profile
from .quadrature import tensor_ball_nodes

DISJOINTNESS_MARGIN = 1e-9


@dataclass(frozen=True)
class TildeMap:
    """Cyclic index map: (a1,a2) -> (a2,a1) in 2D, (a1,a2,a3) -> (a2,a3,a1) in 3D."""

    dimension: int

    def __post_init__(self):
        if self.dimension not in (2, 3):
            raise ValueError("dimension must be 2 or 3")

    @property
    def permutation(self):
        return (1, 0) if self.dimension == 2 else (1, 2, 0)

    def apply(self, v):
        v = np.asarray(v)
        return v[..., list(self.permutation)]

    def matrix(self):
        m = np.zeros((self.dimension, self.dimension))
        for i, j in enumerate(self.permutation):
            m[i, j] = 1.0
        return m


def term_orbit(alpha, dimension: int):
    """All bump centers contributed by one modulation vector."""
    tilde = TildeMap(dimension)
    centers = [np.asarray(alpha, dtype=float)]
    for _ in range(dimension - 1):
        centers.append(tilde.apply(centers[-1]))
    return [s * c for c in centers for s in (+1.0, -1.0)]


def orbit_signs(dimension: int):
    """Signs of the bumps along term_orbit order."""
    if dimension == 2:
        return [+1.0, +1.0, -1.0, -1.0]
    return [+1.0] * 6


@dataclass(frozen=True)
class DatumSpec:
    """Validated description of one datum: dimension, dilation, amplitude, terms."""

    dimension: int
    delta: float
    eta: float
    lambdas: tuple
    alphas: tuple  # tuple of d-vectors (tuples)
    profile: BumpProfile
    profile_name: str = "smooth-bump"

    @property
    def terms(self):
        return list(zip(self.lambdas, [np.array(a) for a in self.alphas]))

    def max_alpha_norm(self) -> float:
        return max(float(np.linalg.norm(a)) for a in self.alphas) if self.alphas else 0.0

    def max_wavenumber(self) -> float:
        return self.max_alpha_norm() + self.delta

    def with_eta(self, eta: float) -> "DatumSpec":
        return replace(self, eta=float(eta))

    def with_delta(self, delta: float) -> "DatumSpec":
        spec = replace(self, delta=float(delta))
        validate_spec(spec)
        return spec

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "delta": self.delta,
            "eta": self.eta,
            "profile": self.profile_name,
            "terms": [
                {"lambda": float(l), "alpha": [float(x) for x in a]}
                for l, a in zip(self.lambdas, self.alphas)
            ],
        }

    @staticmethod
    def from_dict(data: dict) -> "DatumSpec":
        name = data.get("profile", "smooth-bump")
        dim = int(data["dimension"])
        spec = DatumSpec(
            dimension=dim,
            delta=float(data["delta"]),
            eta=float(data["eta"]),
            lambdas=tuple(float(t["lambda"]) for t in data["terms"]),
            alphas=tuple(tuple(float(x) for x in t["alpha"]) for t in data["terms"]),
            profile=get_profile(name, dim),
            profile_name=name,
        )
        validate_spec(spec)
        return spec


def make_spec(dimension, delta, eta, lambdas, alphas, profile_name="smooth-bump"):
    spec = DatumSpec(
        dimension=int(dimension),
        delta=float(delta),
        eta=float(eta),
        lambdas=tuple(float(l) for l in lambdas),
        alphas=tuple(tuple(float(x) for x in a) for a in alphas),
        profile=get_profile(profile_name, int(dimension)),
        profile_name=profile_name,
    )
    validate_spec(spec)
    return spec


def cone_margin(alpha, dimension: int) -> float:
    """Distance from alpha to the boundary of its admissible cone."""
    a = np.asarray(alpha, dtype=float)
    if dimension == 2:
        return (a[0] - abs(a[1])) / np.sqrt(2.0)
    lower = min(a[1], a[2])
    return min((lower - max(a[0], 0.0)) / np.sqrt(2.0), lower)


def validate_spec(spec: DatumSpec) -> None:
    """Check cone admissibility and pairwise support disjointness."""
    if spec.dimension not in (2, 3):
        raise SpecValidationError("dimension must be 2 or 3")
    if spec.delta <= 0.0:
        raise SpecValidationError("delta must be positive")
    if len(spec.lambdas) != len(spec.alphas):
        raise SpecValidationError("lambdas and alphas must pair up")
    margin = DISJOINTNESS_MARGIN * max(spec.max_alpha_norm(), 1.0)
    for j, alpha in enumerate(spec.alphas):
        a = np.asarray(alpha, dtype=float)
        if a.shape != (spec.dimension,):
            raise SpecValidationError(f"alpha_{j} has wrong dimension")
        if spec.dimension == 2:
            if a[1] == 0.0:
                raise SpecValidationError(f"alpha_{j}: second component must be nonzero")
            if not a[0] > abs(a[1]) + spec.delta * np.sqrt(2.0) + margin:
                raise SpecValidationError(
                    f"alpha_{j}={tuple(a)}: needs alpha_1 > |alpha_2| + delta*sqrt(2)"
                )
        else:
            if a[1] == a[2]:
                raise SpecValidationError(f"alpha_{j}: needs alpha_2 != alpha_3")
            if not cone_margin(a, 3) > spec.delta + margin:
                raise SpecValidationError(
                    f"alpha_{j}={tuple(a)}: bump ball leaves the admissible cone"
                )
    centers = []
    for j, alpha in enumerate(spec.alphas):
        for c in term_orbit(alpha, spec.dimension):
            centers.append((j, c))
    for i in range(len(centers)):
        for k in range(i + 1, len(centers)):
            dist = float(np.linalg.norm(centers[i][1] - centers[k][1]))
            if dist <= 2.0 * spec.delta + margin:
                raise SupportOverlapError(
                    f"bump supports overlap: centers from terms {centers[i][0]} and "
                    f"{centers[k][0]} are {dist:.6g} apart (need > {2 * spec.delta:.6g})"
                )


def psi_hat(spec: DatumSpec, j: int, xi) -> np.ndarray:
    """Scalar stream envelope of term j at frequency xi (vectorized over rows)."""
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    total = np.zeros(xi.shape[0])
    scale = spec.delta ** (spec.dimension / 2.0)
    for sign, center in zip(orbit_signs(spec.dimension), term_orbit(spec.alphas[j], spec.dimension)):
        r = np.linalg.norm(xi - center[None, :], axis=1) / spec.delta
        total += sign * spec.profile(r) / scale
    return total


def curl_prefactor(xi, dimension: int) -> np.ndarray:
    """Vector multiplier turning the stream envelope into the datum transform."""
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    if dimension == 2:
        return np.stack([-1j * xi[:, 1], 1j * xi[:, 0]], axis=-1)
    return np.stack(
        [
            1j * (xi[:, 1] - xi[:, 2]),
            1j * (xi[:, 2] - xi[:, 0]),
            1j * (xi[:, 0] - xi[:, 1]),
        ],
        axis=-1,
    )


def datum_hat(spec: DatumSpec, xi) -> np.ndarray:
    """Fourier transform of the datum at frequencies xi; shape (n, d)."""
    xi_arr = np.atleast_2d(np.asarray(xi, dtype=float))
    envelope = np.zeros(xi_arr.shape[0])
    for j, lam in enumerate(spec.lambdas):
        if lam != 0.0:
            envelope += lam * psi_hat(spec, j, xi_arr)
    out = spec.eta * curl_prefactor(xi_arr, spec.dimension) * envelope[:, None]
    if np.asarray(xi).ndim == 1:
        return out[0]
    return out


def moment_matrix_zero(spec: DatumSpec, nodes_per_axis: int = 48) -> np.ndarray:
    """The d x d matrix of spatial products int a_j a_k dx at time zero.

    Computed by Plancherel quadrature over the (disjoint) bump supports.
    """
    d = spec.dimension
    out = np.zeros((d, d))
    for j, (lam, alpha) in enumerate(spec.terms):
        if lam == 0.0:
            continue
        for center in term_orbit(alpha, d):
            pts, wts = tensor_ball_nodes(center, spec.delta, nodes_per_axis)
            psi = lam * psi_hat(spec, j, pts)
            pref = curl_prefactor(pts, d)
            amp = np.abs(psi) ** 2 * wts
            for h in range(d):
                for k in range(d):
                    out[h, k] += np.sum((pref[:, h] * np.conj(pref[:, k])).real * amp)
    return spec.eta**2 * out / (2.0 * np.pi) ** d
