"""Velocity-correlation diagnostics.

E(t) is minus the time integral of int (e^{sL} a)_1 (e^{sL} a)_2 dx, the
quantity whose sign changes drive the whole construction.  Two independent
evaluators are provided: a closed form that does the time integral exactly
and quadrature over the (disjoint) Fourier bump supports, and an oracle that
assembles the datum on a lattice and integrates in time by composite
Simpson.  Both carry the same (2 pi)^-d Plancherel normalization, so at
small dilation either converges to the designed target curve with constant
exactly one.
"""

from dataclasses import dataclass

import numpy as np

from .datum import DatumSpec, orbit_signs, term_orbit, psi_hat
from .design import DesignSolution, eval_Eapp
from .errors import SpecValidationError, UnderResolvedError
from .lattice import sparse_support_values
from .quadrature import simpson_weights, tensor_ball_nodes

MIN_NODES = 8


def correlation_weight(pts, dimension: int) -> np.ndarray:
    """Frequency weight of the correlation integrand (before time factors)."""
    pts = np.atleast_2d(pts)
    norm2 = np.sum(pts * pts, axis=1)
    if dimension == 2:
        return pts[:, 0] * pts[:, 1] / (2.0 * norm2)
    return (pts[:, 0] - pts[:, 2]) * (pts[:, 1] - pts[:, 2]) / (2.0 * norm2)


@dataclass(frozen=True)
class _BallQuadrature:
    points: np.ndarray
    base: np.ndarray  # weight * |envelope|^2 * quadrature weights
    norm2: np.ndarray


def _ball_quadratures(spec: DatumSpec, nodes: int):
    if nodes < MIN_NODES:
        raise UnderResolvedError(
            f"need at least {MIN_NODES} quadrature nodes per axis", parameter="nodes"
        )
    out = []
    scale = spec.eta**2 / (2.0 * np.pi) ** spec.dimension
    for j, (lam, alpha) in enumerate(spec.terms):
        if lam == 0.0:
            continue
        for center in term_orbit(alpha, spec.dimension):
            pts, wts = tensor_ball_nodes(center, spec.delta, nodes)
            envelope = lam * psi_hat(spec, j, pts)
            base = scale * correlation_weight(pts, spec.dimension) * envelope**2 * wts
            keep = base != 0.0
            out.append(
                _BallQuadrature(
                    points=pts[keep],
                    base=base[keep],
                    norm2=np.sum(pts[keep] ** 2, axis=1),
                )
            )
    return out


def eval_E_closed(spec: DatumSpec, t, nodes: int = 48):
    """Closed-form evaluation; vectorized over t."""
    quads = _ball_quadratures(spec, nodes)
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    vals = np.zeros(t_arr.size)
    for q in quads:
        vals += np.sum(
            q.base[None, :] * (1.0 - np.exp(-2.0 * t_arr[:, None] * q.norm2[None, :])),
            axis=1,
        )
    return vals if np.ndim(t) else float(vals[0])


class OracleEvaluator:
    """Lattice + Simpson evaluator of the correlation integral.

    Assembling the support once makes repeated t evaluations cheap; only the
    nonzero coefficients (the bump supports) are retained, so lattices far
    beyond dense-array sizes are fine.
    """

    def __init__(self, spec: DatumSpec, L: float, N: int):
        k2, coeffs, grid = sparse_support_values(spec, L, N)
        self._prod = (coeffs[:, 0] * np.conj(coeffs[:, 1])).real / L**spec.dimension
        self._k2 = k2
        self.grid = grid

    def __call__(self, t: float, m: int = 256) -> float:
        if t == 0.0:
            return 0.0
        s = np.linspace(0.0, t, m + 1)
        w = simpson_weights(m, s[1] - s[0])
        heat = np.exp(-2.0 * s[:, None] * self._k2[None, :])
        inner = heat @ self._prod
        return float(-np.dot(w, inner))


def eval_E_oracle(spec: DatumSpec, t: float, m: int = 256, L: float = None, N: int = None) -> float:
    """One-shot oracle evaluation (see OracleEvaluator for batched use)."""
    if L is None or N is None:
        L, N = default_oracle_grid(spec)
    return OracleEvaluator(spec, L, N)(t, m=m)


def default_oracle_grid(spec: DatumSpec):
    """Lattice resolving the spec with sampling error near 1e-7.

    The bump envelope's transform decays stretched-exponentially, so the
    lattice sum needs delta * L around 100 for that accuracy.
    """
    L = 100.0 / spec.delta
    k_need = spec.max_wavenumber() + 1.5 * spec.delta
    N = int(2 * np.ceil(L * k_need / (2.0 * np.pi)) + 2)
    return L, N


def find_sign_changes(evaluator, interval, tolerance: float, samples: int = 64):
    """Bracketed zero crossings of a continuous scalar function.

    Scans ``samples`` uniform points, then bisects each sign flip down to
    ``tolerance``.  Returns a list of (lo, hi) with opposite signs at the
    endpoints; no crossing found gives an empty list.
    """
    lo, hi = float(interval[0]), float(interval[1])
    ts = np.linspace(lo, hi, samples)
    vals = np.array([evaluator(t) for t in ts])
    out = []
    for i in range(samples - 1):
        a, b = ts[i], ts[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0:
            continue
        if fa * fb < 0.0:
            while b - a > tolerance:
                mid = 0.5 * (a + b)
                fm = evaluator(mid)
                if fm == 0.0:
                    a, b = mid - 0.25 * tolerance, mid + 0.25 * tolerance
                    break
                if fa * fm < 0.0:
                    b, fb = mid, fm
                else:
                    a, fa = mid, fm
            out.append((a, b))
    return out


def delta_sweep(design: DesignSolution, deltas, t_grid, nodes: int = 48):
    """Deviation of E from the design target along a list of dilations.

    Each entry reports sup over the time grid of |E(t) - E_app(t)|, or the
    validation error that makes the dilation inadmissible.
    """
    t_arr = np.asarray(t_grid, dtype=float)
    target = np.array([eval_Eapp(design.mu, design.problem.gamma, t) for t in t_arr])
    rows = []
    for delta in deltas:
        try:
            spec = design.datum_spec(float(delta), eta=1.0)
        except SpecValidationError as exc:
            rows.append({"delta": float(delta), "valid": False, "reason": str(exc)})
            continue
        vals = eval_E_closed(spec, t_arr, nodes=nodes)
        rows.append(
            {
                "delta": float(delta),
                "valid": True,
                "sup_deviation": float(np.max(np.abs(vals - target))),
            }
        )
    return rows
