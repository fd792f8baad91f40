"""Truncated power-series solution of the mild formulation.

T_1 is the heat flow of the datum; higher terms follow the convolution
recursion T_k = sum_{l} B(T_l, T_{k-l}) with

    B(u, v)(t) = - int_0^t e^{(t-s) Lap} P div(u (x) v)(s) ds,

evaluated by Simpson-type quadrature on a shared uniform time grid.  Tables
are memoized per order; the bilinear integrand reuses the stepper's
dealiased product machinery, so stepper and series approximate the same
truncated dynamics.
"""

import numpy as np

from ..errors import GridMismatchError, MomentflowError
from ..lattice import SpectralField, component_products
from ..quadrature import simpson_any_weights
from .stepper import FlowTrajectory, _divergence_of_products, _physical, _project, heat

DEFAULT_MAX_ORDER = 4


class PicardTable:
    """Series terms of orders 1..max_order on a uniform time grid."""

    def __init__(self, datum: SpectralField, t_grid, max_order: int = DEFAULT_MAX_ORDER, workers: int = -1):
        t_grid = np.asarray(t_grid, dtype=float)
        if t_grid[0] != 0.0 or t_grid.size < 3:
            raise ValueError("time grid must start at 0 with at least 3 points")
        steps = np.diff(t_grid)
        if not np.allclose(steps, steps[0], rtol=1e-12, atol=0.0):
            raise ValueError("time grid must be uniform")
        self.datum = datum
        self.grid = datum.grid
        self.t_grid = t_grid
        self.h = float(steps[0])
        self.max_order = int(max_order)
        self.workers = workers
        self._mask = datum.grid.dealias_mask()
        self._terms: dict[int, list[np.ndarray]] = {}

    def term(self, k: int) -> list:
        """Coefficient arrays of T_k at every grid time."""
        if k < 1:
            raise ValueError("order starts at 1")
        if k > self.max_order:
            raise MomentflowError(
                f"order {k} beyond configured maximum {self.max_order}"
            )
        if k not in self._terms:
            self._terms[k] = self._compute(k)
        return self._terms[k]

    def term_field(self, k: int, index: int) -> SpectralField:
        return SpectralField(self.grid, self.term(k)[index], float(self.t_grid[index]))

    def partial_sum(self, order: int, index: int) -> SpectralField:
        total = np.zeros_like(self.datum.coeffs)
        for k in range(1, order + 1):
            total = total + self.term(k)[index]
        return SpectralField(self.grid, total, float(self.t_grid[index]))

    def _compute(self, k: int) -> list:
        if k == 1:
            base = self.datum.coeffs * self._mask[None]
            return [
                np.exp(-t * self.grid.k2)[None] * base for t in self.t_grid
            ]
        pairs = [(l, k - l) for l in range(1, k)]
        # physical samples of lower-order terms at every grid time
        phys = {}
        for l in set(l for pair in pairs for l in pair):
            phys[l] = [
                _physical(c, self.grid, self._mask, self.workers) for c in self.term(l)
            ]
        # projected divergence of the symmetrized products at every s
        integrand = []
        for i in range(self.t_grid.size):
            total = None
            seen = set()
            for l, m in pairs:
                if (m, l) in seen:
                    continue
                seen.add((l, m))
                weight = 2.0 if l != m else 1.0
                div = _divergence_of_products(
                    phys[l][i], phys[m][i], self.grid, self._mask, self.workers
                )
                contrib = weight * _project(div, self.grid)
                total = contrib if total is None else total + contrib
            integrand.append(total)
        # B accumulates the heat-propagated integrand up to each grid time
        out = [np.zeros_like(self.datum.coeffs)]
        k2 = self.grid.k2
        for i in range(1, self.t_grid.size):
            t = self.t_grid[i]
            w = simpson_any_weights(i + 1, self.h)
            acc = np.zeros_like(self.datum.coeffs)
            for j in range(i + 1):
                acc += w[j] * np.exp(-(t - self.t_grid[j]) * k2)[None] * integrand[j]
            out.append(-acc)
        return out


def bilinear_B(u: FlowTrajectory, v: FlowTrajectory, t: float, workers: int = -1) -> SpectralField:
    """B(u, v)(t) from two sampled trajectories sharing a uniform grid."""
    if u.grid != v.grid:
        raise GridMismatchError("trajectories live on different lattices")
    if u.times.shape != v.times.shape or not np.allclose(u.times, v.times):
        raise GridMismatchError("trajectories sampled on different time grids")
    times = u.times
    idx = int(np.searchsorted(times, t + 1e-12 * max(t, 1.0)))
    if idx == 0:
        return SpectralField(u.grid, np.zeros_like(u.snapshots[0][1].coeffs), t)
    if not np.isclose(times[idx - 1], t, rtol=1e-9, atol=1e-12):
        raise GridMismatchError(f"t = {t} is not a sample time of the trajectories")
    n = idx - 1
    u_snap = dict(u.snapshots)
    v_snap = dict(v.snapshots)
    for j in range(n + 1):
        if j not in u_snap or j not in v_snap:
            raise GridMismatchError("trajectories are not densely sampled up to t")
    grid = u.grid
    if n == 0:
        return SpectralField(grid, np.zeros_like(u_snap[0].coeffs), t)
    mask = grid.dealias_mask()
    # the tensor product is symmetrized, so bilinear_B(u, v) == bilinear_B(v, u)
    w = simpson_any_weights(n + 1, float(times[1] - times[0]))
    acc = np.zeros_like(u_snap[0].coeffs)
    for j in range(n + 1):
        up = _physical(u_snap[j].coeffs, grid, mask, workers)
        vp = _physical(v_snap[j].coeffs, grid, mask, workers)
        div = _divergence_of_products(up, vp, grid, mask, workers)
        acc += w[j] * np.exp(-(times[n] - times[j]) * grid.k2)[None] * _project(div, grid)
    return SpectralField(grid, -acc, t)


def picard_term(k: int, datum: SpectralField, t_grid, max_order: int = DEFAULT_MAX_ORDER, workers: int = -1) -> FlowTrajectory:
    """Trajectory of the order-k series term on the given uniform grid."""
    table = PicardTable(datum, t_grid, max_order=max_order, workers=workers)
    coeff_list = table.term(k)
    times = table.t_grid
    moments = []
    energies = []
    snaps = []
    for i, c in enumerate(coeff_list):
        fld = SpectralField(datum.grid, c, float(times[i]))
        moments.append(component_products(fld))
        energies.append(fld.energy())
        snaps.append((i, fld))
    return FlowTrajectory(
        grid=datum.grid,
        times=times,
        moments=np.array(moments),
        energies=np.array(energies),
        snapshots=snaps,
        dt=table.h,
        scheme=f"picard-{k}",
    )
