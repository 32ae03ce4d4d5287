"""Exact stationary objects of the star-NLS: projector rings, plateaus, walls.

The radial functions phi_n(r) = 2 (-1)^n exp(-r^2) L_n(2 r^2) are, at the
calibrated noncommutativity scale theta* (empirically 1 in these scaled
variables), orthogonal star-projectors: phi_n * phi_m = delta_nm phi_n.
Plateaus P_n = sum_{j<=n} phi_j are flat discs of radius ~ sqrt(n); walls
W_n = phi_n + phi_{n-1} are annular peaks at r ~ sqrt(n).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import ComplexField2D, GridSpec, laplacian, power, sample_radial
from .moyal import MoyalParams, star


@dataclass(frozen=True)
class StationaryParams:
    """Rotation rate sigma of a separable solution u = exp(i sigma t) zeta(x)."""

    sigma: float
    theta: MoyalParams

    def __post_init__(self) -> None:
        if not np.isfinite(self.sigma):
            raise ValueError("sigma must be finite")


def laguerre(n: int, x):
    """Laguerre polynomial L_n(x) by the three-term recurrence.

    (k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}; stable for n <= 200, |x| <= 400.
    Accepts scalars or arrays.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    x = np.asarray(x, dtype=np.float64)
    lk = np.ones_like(x)
    if n == 0:
        return lk
    lk1 = 1.0 - x
    for k in range(1, n):
        lk, lk1 = lk1, ((2 * k + 1 - x) * lk1 - k * lk) / (k + 1.0)
    return lk1


def _check_decay(grid: GridSpec) -> None:
    if np.exp(-grid.L**2) >= 1e-12:
        raise ValueError(
            f"grid half-width L={grid.L} too small: exp(-L^2) must be < 1e-12"
        )


def phi_n(n: int, grid: GridSpec) -> ComplexField2D:
    """Projector ring 2 (-1)^n exp(-r^2) L_n(2 r^2)."""
    _check_decay(grid)
    return sample_radial(
        lambda r: 2.0 * (-1) ** n * np.exp(-(r**2)) * laguerre(n, 2.0 * r**2),
        0,
        grid,
    )


def plateau(n: int, grid: GridSpec) -> ComplexField2D:
    """P_n = sum_{j<=n} phi_j: flat disc out to r ~ sqrt(n)."""
    vals = np.zeros((grid.n, grid.n), dtype=np.complex128)
    for j in range(n + 1):
        vals += phi_n(j, grid).values
    return ComplexField2D(grid=grid, values=vals)


def wall(n: int, grid: GridSpec) -> ComplexField2D:
    """W_n = phi_n + phi_{n-1}: annular peak at r ~ sqrt(n)."""
    if n < 1:
        raise ValueError("wall requires n >= 1")
    return ComplexField2D(
        grid=grid, values=phi_n(n, grid).values + phi_n(n - 1, grid).values
    )


def stationary_residual(
    zeta: ComplexField2D, sp: StationaryParams, drop_laplacian: bool = False
) -> float:
    """L2 residual of -sigma zeta = lap(zeta) + zeta*zeta*zeta, relative to ||zeta||.

    With drop_laplacian the algebraic (projector) part is isolated; the
    Laplacian is otherwise computed spectrally.
    """
    nrm = np.sqrt(power(zeta))
    if nrm == 0.0:
        raise ValueError("zeta must be nonzero")
    cubic = star(star(zeta, zeta, sp.theta), zeta, sp.theta)
    res = -sp.sigma * zeta.values - cubic.values
    if not drop_laplacian:
        res -= laplacian(zeta).values
    return float(np.sqrt(np.sum(np.abs(res) ** 2) * zeta.grid.dx**2) / nrm)


def projector_defect(theta: float, n_max: int, grid: GridSpec) -> float:
    """sum_{n<=n_max} ||phi_n * phi_n - phi_n||^2 at the given theta."""
    p = MoyalParams(theta=theta)
    total = 0.0
    for n in range(n_max + 1):
        f = phi_n(n, grid)
        s = star(f, f, p)
        total += power(ComplexField2D(grid, s.values - f.values))
    return total


def calibrate_theta(
    n_max: int, grid: GridSpec | None = None, tol: float = 1e-4
) -> float:
    """Theta* minimizing the summed projector defect of phi_0..phi_{n_max}.

    Coarse logarithmic scan over two decades around 1, then golden-section
    refinement of the bracketing triple down to the requested tolerance.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    if grid is None:
        grid = GridSpec(n=128, L=8.0)

    thetas = np.logspace(-1.0, 1.0, 17)
    vals = [projector_defect(t, n_max, grid) for t in thetas]
    i = int(np.argmin(vals))
    if i == 0 or i == len(thetas) - 1:
        raise RuntimeError("projector defect not bracketed in [0.1, 10]")

    lo, hi = thetas[i - 1], thetas[i + 1]
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1 = projector_defect(x1, n_max, grid)
    f2 = projector_defect(x2, n_max, grid)
    while hi - lo > tol:
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = projector_defect(x1, n_max, grid)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = projector_defect(x2, n_max, grid)
    return float(0.5 * (lo + hi))
