"""Uniform periodic grids and continuum-normalized Fourier transforms.

The domain is the half-open square [-L, L)^2 with n points per axis and
periodic wrap.  The transform pair carries the continuum measure factors
(dx^2 forward, dk^2/(2pi)^2 backward) so that spectral entries approximate
uhat(k) = integral exp(-i k.x) u(x) dx and every continuum formula
transcribes literally.  Fields of interest decay like Gaussians; callers
must choose L large enough for their data (>= R + 5*omega for ring-shaped
fields) -- documented, not enforced.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    """Square periodic grid: n points per axis on [-L, L)^2.

    Wavenumbers are k_j = pi*j/L for j in {-n/2, ..., n/2 - 1}, stored in
    FFT layout (0, 1, ..., n/2-1, -n/2, ..., -1).  Axis 0 of a field array
    is x, axis 1 is y.
    """

    n: int
    L: float

    def __post_init__(self) -> None:
        if self.n % 2 != 0 or self.n < 8:
            raise ValueError(f"n must be even and >= 8, got {self.n}")
        if not self.L > 0:
            raise ValueError(f"L must be positive, got {self.L}")

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.n

    @cached_property
    def xs(self) -> np.ndarray:
        return -self.L + self.dx * np.arange(self.n)

    @cached_property
    def ks(self) -> np.ndarray:
        # 2*pi*fftfreq(n, dx) == pi*j/L in FFT layout
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    @cached_property
    def x_mesh(self) -> np.ndarray:
        return np.broadcast_to(self.xs[:, None], (self.n, self.n))

    @cached_property
    def y_mesh(self) -> np.ndarray:
        return np.broadcast_to(self.xs[None, :], (self.n, self.n))

    @cached_property
    def r_mesh(self) -> np.ndarray:
        return np.hypot(self.x_mesh, self.y_mesh)

    @cached_property
    def theta_mesh(self) -> np.ndarray:
        return np.arctan2(self.y_mesh, self.x_mesh)

    @cached_property
    def k2_mesh(self) -> np.ndarray:
        return self.ks[:, None] ** 2 + self.ks[None, :] ** 2

    @cached_property
    def phase_sign(self) -> np.ndarray:
        # (-1)^(i+j): converts the DFT (origin at index 0) to the
        # centered transform with x_0 = -L.  Valid because n is even.
        s = np.where(np.arange(self.n) % 2 == 0, 1.0, -1.0)
        return s[:, None] * s[None, :]

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        # 2/3 rule on each axis, for cubic-nonlinearity alias control
        kcut = (2.0 / 3.0) * np.abs(self.ks).max()
        keep = np.abs(self.ks) <= kcut
        return keep[:, None] & keep[None, :]


@dataclass
class ComplexField2D:
    """Complex scalar field sampled on a GridSpec (axis 0 = x, axis 1 = y)."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != (self.grid.n, self.grid.n):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid n={self.grid.n}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite entries")


@dataclass
class SpectrumField2D:
    """Continuum-normalized spectrum: entries approximate uhat(k) (FFT layout)."""

    grid: GridSpec
    values: np.ndarray


def make_grid(n: int, L: float) -> GridSpec:
    """Validated GridSpec with dx = 2L/n and k_j = pi*j/L."""
    return GridSpec(n=int(n), L=float(L))


def forward_transform(f: ComplexField2D) -> SpectrumField2D:
    """Discrete approximation of uhat(k) = integral exp(-i k.x) u dx.

    Exact inverse of inverse_transform (the measure factors cancel), so the
    round trip is identity to rounding.
    """
    g = f.grid
    vals = g.dx**2 * g.phase_sign * np.fft.fft2(f.values)
    return SpectrumField2D(grid=g, values=vals)


def inverse_transform(F: SpectrumField2D) -> ComplexField2D:
    """Inverse of forward_transform: u(x) = (2pi)^-2 integral exp(i k.x) uhat dk."""
    g = F.grid
    vals = np.fft.ifft2(g.phase_sign * F.values) / g.dx**2
    return ComplexField2D(grid=g, values=vals)


def sample_radial(
    fn: Callable[[np.ndarray], np.ndarray], m: int, grid: GridSpec
) -> ComplexField2D:
    """Sample fn(r) * exp(i*m*theta) on the grid."""
    radial = np.asarray(fn(grid.r_mesh), dtype=np.complex128)
    if m == 0:
        vals = radial
    else:
        vals = radial * np.exp(1j * m * grid.theta_mesh)
    return ComplexField2D(grid=grid, values=vals)


def radial_profile(
    f: ComplexField2D, n_bins: int
) -> list[tuple[float, float]]:
    """Annulus-averaged |f|: list of (bin center, mean |f|) for bins of [0, L].

    Bin centers sit at (i + 1/2) * L / n_bins; empty bins are omitted.
    Grid points with r > L (the corners) are ignored.
    """
    if n_bins < 4:
        raise ValueError(f"n_bins must be >= 4, got {n_bins}")
    g = f.grid
    dr = g.L / n_bins
    r = g.r_mesh.ravel()
    mag = np.abs(f.values).ravel()
    inside = r < g.L
    idx = np.minimum((r[inside] / dr).astype(np.intp), n_bins - 1)
    counts = np.bincount(idx, minlength=n_bins)
    sums = np.bincount(idx, weights=mag[inside], minlength=n_bins)
    out = []
    for i in range(n_bins):
        if counts[i]:
            out.append(((i + 0.5) * dr, sums[i] / counts[i]))
    return out


def power(f: ComplexField2D) -> float:
    """Discrete integral of |u|^2 dx (the conserved L2 mass)."""
    return float(np.sum(np.abs(f.values) ** 2) * f.grid.dx**2)


def spectral_power(F: SpectrumField2D) -> float:
    """Parseval partner of power: (2pi)^-2 sum |uhat|^2 dk^2."""
    g = F.grid
    dk = np.pi / g.L
    return float(np.sum(np.abs(F.values) ** 2) * dk**2 / (2.0 * np.pi) ** 2)


def laplacian(f: ComplexField2D) -> ComplexField2D:
    """Spectral Laplacian (periodic)."""
    F = np.fft.fft2(f.values)
    return ComplexField2D(grid=f.grid, values=np.fft.ifft2(-f.grid.k2_mesh * F))


def gradient_norm_sq(f: ComplexField2D) -> float:
    """Discrete integral of |grad u|^2 dx, computed spectrally."""
    g = f.grid
    F = np.fft.fft2(f.values)
    # Parseval in plain-DFT normalization: sum k^2 |F|^2 * dx^2 / n^2
    return float(np.sum(g.k2_mesh * np.abs(F) ** 2) * g.dx**2 / g.n**2)


def partial_derivatives(f: ComplexField2D) -> tuple[np.ndarray, np.ndarray]:
    """Spectral (d/dx, d/dy) of the field values."""
    g = f.grid
    F = np.fft.fft2(f.values)
    fx = np.fft.ifft2(1j * g.ks[:, None] * F)
    fy = np.fft.ifft2(1j * g.ks[None, :] * F)
    return fx, fy
