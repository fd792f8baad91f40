"""Moment matrix K(t) and its off-diagonal zeros.

K(t) is the running time integral of the component products int u_h u_k dx.
With the rotational symmetry of the designed data, K is isotropic exactly
when its (1,2) entry vanishes, so the zero crossings of K_12 are the times
where the far-field profile collapses.
"""

from dataclasses import dataclass

import numpy as np

from ..datum import DatumSpec
from ..errors import CalibrationError
from ..lattice import SpectralField
from ..quadrature import cumulative_trapezoid
from .stepper import FlowTrajectory, fnorm_diag, heat_trajectory, simulate


@dataclass
class MomentTrajectory:
    times: np.ndarray
    K: np.ndarray  # (n, d, d)
    quadrature: str = "trapezoid"

    @property
    def dimension(self) -> int:
        return self.K.shape[1]

    def interpolate(self, t: float) -> np.ndarray:
        """Linear interpolation of K at time t."""
        out = np.empty(self.K.shape[1:])
        for h in range(self.K.shape[1]):
            for k in range(self.K.shape[2]):
                out[h, k] = np.interp(t, self.times, self.K[:, h, k])
        return out

    def k12(self) -> np.ndarray:
        return self.K[:, 0, 1]

    def diagonal_spread(self) -> float:
        """max over time of the diagonal spread relative to the diagonal size."""
        diag = np.stack([self.K[:, i, i] for i in range(self.dimension)], axis=1)
        spread = diag.max(axis=1) - diag.min(axis=1)
        scale = np.maximum(np.abs(diag).max(axis=1), 1e-300)
        return float(np.max(spread / scale))


def accumulate_K(traj: FlowTrajectory) -> MomentTrajectory:
    """Cumulative trapezoid of the per-step component products."""
    n, d, _ = traj.moments.shape
    K = np.empty_like(traj.moments)
    for h in range(d):
        for k in range(d):
            K[:, h, k] = cumulative_trapezoid(traj.moments[:, h, k], traj.times)
    return MomentTrajectory(times=traj.times.copy(), K=K)


def find_zero_K12(moment: MomentTrajectory, interval, refine=None) -> dict:
    """Bracket the sign changes of K_12 inside the interval.

    Returns a dict with ``found``, a list of brackets (t_lo, t_hi, t_star),
    and the extrema of K_12 on the interval when nothing is found.  Pass
    ``refine=(trajectory, factor)`` to re-simulate locally at dt/factor from
    the nearest stored snapshot and tighten each bracket.
    """
    lo, hi = float(interval[0]), float(interval[1])
    sel = (moment.times >= lo) & (moment.times <= hi)
    t = moment.times[sel]
    v = moment.k12()[sel]
    if t.size < 2:
        return {"found": False, "brackets": [], "reason": "interval has < 2 samples"}
    crossings = []
    for i in range(t.size - 1):
        if v[i] == 0.0:
            continue
        if v[i] * v[i + 1] < 0.0:
            t_star = t[i] - v[i] * (t[i + 1] - t[i]) / (v[i + 1] - v[i])
            crossings.append((float(t[i]), float(t[i + 1]), float(t_star)))
    if not crossings:
        return {
            "found": False,
            "brackets": [],
            "k12_min": float(np.min(v)),
            "k12_max": float(np.max(v)),
        }
    if refine is not None:
        traj, factor = refine
        crossings = [_refine_bracket(traj, moment, b, factor) for b in crossings]
    return {"found": True, "brackets": crossings}


def _refine_bracket(traj: FlowTrajectory, moment: MomentTrajectory, bracket, factor: int):
    """Re-simulate from the snapshot before the bracket at dt/factor."""
    t_lo, t_hi, _ = bracket
    idx, fld = traj.snapshot_before(t_lo)
    k_offset = moment.interpolate(traj.times[idx])
    local = simulate(
        fld.copy(),
        t_end=t_hi + 2 * traj.dt - traj.times[idx],
        dt=traj.dt / factor,
        snapshot_stride=10**9,
    )
    k12 = k_offset[0, 1] + cumulative_trapezoid(local.moments[:, 0, 1], local.times)
    for i in range(k12.size - 1):
        if k12[i] * k12[i + 1] < 0.0:
            t_star = local.times[i] - k12[i] * (local.times[i + 1] - local.times[i]) / (
                k12[i + 1] - k12[i]
            )
            return (float(local.times[i]), float(local.times[i + 1]), float(t_star))
    return bracket


def second_order_remainder(moment: MomentTrajectory, eta: float, e_curve) -> np.ndarray:
    """K_12(t) + eta^2 E(t) sampled on the moment times (E for the unit datum)."""
    e_vals = np.asarray(e_curve(moment.times), dtype=float)
    return moment.k12() + eta**2 * e_vals


@dataclass
class Calibration:
    eta: float
    remainder_ratio: float
    fnorm_unit: float
    history: list


def calibrate_eta(
    spec_unit: DatumSpec,
    L: float,
    N: int,
    t_end: float,
    e_curve,
    dt: float | None = None,
    target: float = 0.1,
    eta_start: float | None = None,
    max_halvings: int = 6,
    workers: int = -1,
) -> Calibration:
    """Find an amplitude where the quadratic term dominates K_12.

    Starts from 0.1 / F(unit heat flow) and halves eta until
    max_t |K_12 + eta^2 E| <= target * eta^2 * max_t |E|.
    """
    from ..lattice import assemble_spectral

    datum = assemble_spectral(spec_unit, L, N)
    if eta_start is None:
        probe_times = np.linspace(0.0, t_end, 9)
        fn = fnorm_diag(heat_trajectory(datum, probe_times, snapshot_stride=2), workers=workers)
        eta = 0.1 / fn
    else:
        fn = float("nan")
        eta = float(eta_start)
    e_scale = float(np.max(np.abs(e_curve(np.linspace(0.0, t_end, 65)))))
    history = []
    for _ in range(max_halvings + 1):
        traj = simulate(
            SpectralField(datum.grid, eta * datum.coeffs, 0.0),
            t_end=t_end,
            dt=dt,
            workers=workers,
        )
        moment = accumulate_K(traj)
        rem = second_order_remainder(moment, eta, e_curve)
        ratio = float(np.max(np.abs(rem)) / (eta**2 * e_scale))
        history.append({"eta": eta, "remainder_ratio": ratio})
        if ratio <= target:
            return Calibration(eta=eta, remainder_ratio=ratio, fnorm_unit=fn, history=history)
        eta *= 0.5
    raise CalibrationError(
        f"could not reach remainder ratio {target} within {max_halvings} halvings; "
        f"history: {history}"
    )
