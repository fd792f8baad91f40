"""Periodic Fourier lattice, spectral fields, and datum assembly.

Conventions.  A field u on the box [-L/2, L/2)^d is stored through samples
of its continuum Fourier transform on the lattice k in (2 pi / L) Z^d,
truncated to N points per axis in fftfreq order.  Physical samples and
integrals follow from

    u(x)            = L^-d  sum_k  u_hat(k) exp(i k.x)
    int u v dx      = L^-d  sum_k  u_hat(k) conj(v_hat(k))     (u, v real)

which is the lattice form of the (2 pi)^-d Plancherel identity.
"""

import struct
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy import fft as sfft

from .datum import DatumSpec, TildeMap, datum_hat, term_orbit
from .errors import GridMismatchError, UnderResolvedError

MAGIC = b"FLOWFLD1"


@lru_cache(maxsize=16)
def _wavenumbers(L: float, N: int, dimension: int):
    k1 = 2.0 * np.pi * np.fft.fftfreq(N, d=L / N)
    axes = np.meshgrid(*([k1] * dimension), indexing="ij")
    k = np.stack(axes, axis=0)
    k2 = np.sum(k * k, axis=0)
    return k, k2


@dataclass(frozen=True)
class Grid:
    dimension: int
    L: float
    N: int

    def __post_init__(self):
        if self.N % 2 != 0:
            raise ValueError("N must be even")

    @property
    def k(self):
        return _wavenumbers(self.L, self.N, self.dimension)[0]

    @property
    def k2(self):
        return _wavenumbers(self.L, self.N, self.dimension)[1]

    @property
    def dk(self) -> float:
        return 2.0 * np.pi / self.L

    @property
    def k_max(self) -> float:
        return self.dk * (self.N // 2)

    def dealias_mask(self):
        k1 = 2.0 * np.pi * np.fft.fftfreq(self.N, d=self.L / self.N)
        keep1 = np.abs(k1) < (2.0 / 3.0) * self.k_max
        mask = keep1
        for _ in range(self.dimension - 1):
            mask = np.logical_and.outer(mask, keep1)
        return mask

    def coordinates(self):
        """Physical sample coordinates, centered box [-L/2, L/2)."""
        x1 = -self.L / 2.0 + (self.L / self.N) * np.arange(self.N)
        return np.meshgrid(*([x1] * self.dimension), indexing="ij")

    @property
    def cell_volume(self) -> float:
        return (self.L / self.N) ** self.dimension


@dataclass(frozen=True)
class SpectralField:
    """Divergence-free real vector field stored as Fourier coefficients."""

    grid: Grid
    coeffs: np.ndarray  # shape (d, N, ..., N) complex
    time: float = 0.0

    @property
    def dimension(self) -> int:
        return self.grid.dimension

    def copy(self, coeffs=None, time=None) -> "SpectralField":
        return SpectralField(
            grid=self.grid,
            coeffs=self.coeffs.copy() if coeffs is None else coeffs,
            time=self.time if time is None else time,
        )

    def physical(self, workers: int = -1) -> np.ndarray:
        """Real-space samples, shape (d, N, ..., N)."""
        scale = (self.grid.N / self.grid.L) ** self.dimension
        axes = tuple(range(1, self.dimension + 1))
        return sfft.ifftn(self.coeffs, axes=axes, workers=workers).real * scale

    def l2_norm(self) -> float:
        """sqrt(int |u|^2 dx) over the box."""
        return float(
            np.sqrt(np.sum(np.abs(self.coeffs) ** 2) / self.grid.L**self.dimension)
        )

    def energy(self) -> float:
        return 0.5 * self.l2_norm() ** 2


def require_same_grid(a: SpectralField, b: SpectralField) -> None:
    if a.grid != b.grid:
        raise GridMismatchError(f"incompatible lattices: {a.grid} vs {b.grid}")


def inner_product(a: SpectralField, b: SpectralField) -> float:
    """int a_m b_m dx summed over components, for real fields."""
    require_same_grid(a, b)
    return float(
        np.sum(a.coeffs * np.conj(b.coeffs)).real / a.grid.L**a.dimension
    )


def component_products(field: SpectralField) -> np.ndarray:
    """Matrix of int u_h u_k dx computed by the lattice Plancherel sum."""
    d = field.dimension
    out = np.zeros((d, d))
    vol = field.grid.L**d
    for h in range(d):
        for k in range(h, d):
            val = float(np.sum(field.coeffs[h] * np.conj(field.coeffs[k])).real / vol)
            out[h, k] = out[k, h] = val
    return out


def check_resolution(spec: DatumSpec, grid: Grid) -> None:
    """Raise unless the lattice resolves the bump width and covers all supports."""
    if grid.dk > spec.delta / 4.0:
        raise UnderResolvedError(
            f"lattice spacing {grid.dk:.4g} exceeds delta/4 = {spec.delta / 4:.4g}; "
            f"increase L",
            parameter="L",
        )
    needed = spec.max_wavenumber() + spec.delta
    if grid.k_max < needed:
        raise UnderResolvedError(
            f"lattice max wavenumber {grid.k_max:.4g} below required {needed:.4g}; "
            f"increase N",
            parameter="N",
        )


def support_windows(spec: DatumSpec, grid: Grid):
    """Lattice index windows covering the bump supports.

    Yields (index_arrays, points) per bump bounding box; indices are flat
    per-axis arrays of equal length, points the matching wavenumbers.
    Windows of distinct bumps may overlap near box corners.
    """
    d = spec.dimension
    N, L = grid.N, grid.L
    k1 = 2.0 * np.pi * np.fft.fftfreq(N, d=L / N)
    order = np.argsort(k1)
    sorted_k = k1[order]
    for j, (lam, alpha) in enumerate(spec.terms):
        if lam == 0.0:
            continue
        for center in term_orbit(alpha, d):
            slabs = []
            for axis in range(d):
                lo = np.searchsorted(sorted_k, center[axis] - spec.delta, side="left")
                hi = np.searchsorted(sorted_k, center[axis] + spec.delta, side="right")
                slabs.append(order[lo:hi])
            if any(len(s) == 0 for s in slabs):
                continue
            mesh = np.meshgrid(*slabs, indexing="ij")
            idx = tuple(m.ravel() for m in mesh)
            pts = np.stack([k1[idx[axis]] for axis in range(d)], axis=-1)
            yield idx, pts


def assemble_spectral(spec: DatumSpec, L: float, N: int) -> SpectralField:
    """Sample the datum transform on the lattice.

    Preconditions: the lattice spacing must resolve the bump width
    (dk <= delta/4) and the lattice must cover every bump support.
    """
    grid = Grid(spec.dimension, float(L), int(N))
    check_resolution(spec, grid)
    d = spec.dimension
    coeffs = np.zeros((d,) + (N,) * d, dtype=complex)
    for idx, pts in support_windows(spec, grid):
        vals = datum_hat(spec, pts).reshape(-1, d)
        for m in range(d):
            coeffs[(m,) + idx] = vals[:, m]
    return SpectralField(grid=grid, coeffs=coeffs, time=0.0)


def sparse_support_values(spec: DatumSpec, L: float, N: int):
    """Deduplicated (k2, coefficients) over the datum support.

    Matches the nonzero content of assemble_spectral(spec, L, N) without
    materializing the dense lattice; usable for Plancherel sums at lattice
    sizes far beyond memory.
    """
    grid = Grid(spec.dimension, float(L), int(N))
    check_resolution(spec, grid)
    d = spec.dimension
    flat_idx, vals_list, k2_list = [], [], []
    for idx, pts in support_windows(spec, grid):
        vals = datum_hat(spec, pts).reshape(-1, d)
        flat_idx.append(np.ravel_multi_index(idx, (N,) * d))
        vals_list.append(vals)
        k2_list.append(np.sum(pts * pts, axis=1))
    if not flat_idx:
        return np.zeros(0), np.zeros((0, d), dtype=complex), grid
    flat_idx = np.concatenate(flat_idx)
    vals = np.concatenate(vals_list, axis=0)
    k2 = np.concatenate(k2_list)
    # window corners can overlap; values there are identical, keep one copy
    _, keep = np.unique(flat_idx, return_index=True)
    return k2[keep], vals[keep], grid


def divergence_residual(field: SpectralField) -> float:
    """max_k |k . u_hat(k)| / max_k |u_hat(k)| (0 for the zero field)."""
    k = field.grid.k
    div = np.sum(k * field.coeffs, axis=0)
    peak = float(np.max(np.abs(field.coeffs)))
    if peak == 0.0:
        return 0.0
    return float(np.max(np.abs(div)) / peak)


def conjugate_symmetry_residual(field: SpectralField) -> float:
    """max |u_hat(-k) - conj(u_hat(k))| / max |u_hat| (field realness)."""
    d = field.dimension
    flipped = field.coeffs
    for axis in range(1, d + 1):
        flipped = np.flip(np.roll(flipped, -1, axis=axis), axis=axis)
    peak = float(np.max(np.abs(field.coeffs)))
    if peak == 0.0:
        return 0.0
    return float(np.max(np.abs(flipped - np.conj(field.coeffs))) / peak)


def check_symmetry(field: SpectralField) -> float:
    """Residual of the rotational symmetry: component cycle vs argument cycle.

    Zero (to roundoff) means u_hat_{sigma(m)}(k) = u_hat_m(k_tilde) on the
    whole lattice, the lattice form of a_tilde(x) = a(x_tilde).
    """
    d = field.dimension
    tilde = TildeMap(d)
    perm = tilde.permutation
    # evaluate u_hat_m at permuted wavenumbers by permuting the array axes
    axes = tuple(perm[i] + 1 for i in range(d))
    arg_cycled = np.transpose(field.coeffs, (0,) + axes)
    comp_cycled = field.coeffs[list(perm)]
    peak = float(np.max(np.abs(field.coeffs)))
    if peak == 0.0:
        return 0.0
    return float(np.max(np.abs(comp_cycled - arg_cycled)) / peak)


def save_field(field: SpectralField, path) -> None:
    """Binary layout: magic, uint32 d, uint32 N, float64 L, float64 time,
    then complex128 coefficients, component-major, row-major per component."""
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<IIdd", field.dimension, field.grid.N, field.grid.L, field.time))
        fh.write(np.ascontiguousarray(field.coeffs, dtype=np.complex128).tobytes())


def load_field(path) -> SpectralField:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != MAGIC:
            raise ValueError(f"not a field file (magic {magic!r})")
        d, N, L, time = struct.unpack("<IIdd", fh.read(24))
        data = np.frombuffer(fh.read(), dtype=np.complex128)
    coeffs = data.reshape((d,) + (N,) * d).copy()
    return SpectralField(grid=Grid(d, L, N), coeffs=coeffs, time=time)
