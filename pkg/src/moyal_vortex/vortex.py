"""Coherent-state vortex trial function and parameter recovery from snapshots.

The trial function is a r^m exp(-((r-R)/omega)^2) exp(i(m theta + sigma))
exp(i(r-R)V): an annular ring of radius R, width omega, winding charge m,
radial phase tilt V.  The r^m factor is used for every charge so the field
is smooth at the origin.  fit_ansatz inverts a snapshot back to these
parameters; it is a pure function of a single field (V comes from the
radial phase gradient, not from differencing snapshots).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import ComplexField2D, GridSpec, partial_derivatives, radial_profile

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class VortexParams:
    """Ansatz parameters (amplitude, width, radius, radial velocity, phase, charge)."""

    a: float
    omega: float
    R: float
    V: float
    sigma: float
    m: int

    def __post_init__(self) -> None:
        if not (self.a > 0 and self.omega > 0 and self.R > 0):
            raise ValueError("a, omega, R must be positive")
        if self.m < 1:
            raise ValueError("charge m must be >= 1")
        object.__setattr__(self, "sigma", float(self.sigma) % TWO_PI)


@dataclass
class VortexFit:
    """fit_ansatz result: recovered parameters plus fit-quality flags.

    width_fallback is set when the e^-1 half-width was not bracketed and the
    second-moment width was used instead.
    """

    a: float
    omega: float
    R: float
    V: float
    sigma: float
    m: int
    width_fallback: bool = False

    @property
    def params(self) -> VortexParams:
        return VortexParams(
            a=self.a, omega=self.omega, R=self.R, V=self.V, sigma=self.sigma, m=self.m
        )


def build_ansatz(vp: VortexParams, grid: GridSpec) -> ComplexField2D:
    """Sample the trial function; requires L >= R + 5*omega so the ring fits."""
    if grid.L < vp.R + 5.0 * vp.omega:
        raise ValueError(
            f"domain too small: need L >= R + 5*omega = {vp.R + 5 * vp.omega}, got {grid.L}"
        )
    r = grid.r_mesh
    th = grid.theta_mesh
    vals = (
        vp.a
        * r**vp.m
        * np.exp(-(((r - vp.R) / vp.omega) ** 2))
        * np.exp(1j * (vp.m * th + vp.sigma))
        * np.exp(1j * (r - vp.R) * vp.V)
    )
    return ComplexField2D(grid=grid, values=vals)


def _bilinear(values: np.ndarray, grid: GridSpec, xq: np.ndarray, yq: np.ndarray):
    """Periodic bilinear interpolation of a field at query points."""
    n = grid.n
    fx = (xq + grid.L) / grid.dx
    fy = (yq + grid.L) / grid.dx
    i0 = np.floor(fx).astype(np.intp)
    j0 = np.floor(fy).astype(np.intp)
    tx = fx - i0
    ty = fy - j0
    i0 %= n
    j0 %= n
    i1 = (i0 + 1) % n
    j1 = (j0 + 1) % n
    return (
        values[i0, j0] * (1 - tx) * (1 - ty)
        + values[i1, j0] * tx * (1 - ty)
        + values[i0, j1] * (1 - tx) * ty
        + values[i1, j1] * tx * ty
    )


def winding_number(f: ComplexField2D, r0: float, n_samples: int = 720) -> int:
    """Accumulated unwrapped phase around the loop r = r0, in units of 2 pi.

    Raises if |f| anywhere on the loop falls below 1e-9 * max|f|.
    """
    angles = TWO_PI * np.arange(n_samples) / n_samples
    xq = r0 * np.cos(angles)
    yq = r0 * np.sin(angles)
    samples = _bilinear(f.values, f.grid, xq, yq)
    fmax = np.abs(f.values).max()
    if fmax == 0.0 or np.abs(samples).min() < 1e-9 * fmax:
        raise ValueError(f"loop r={r0} passes too close to a zero of |f|")
    closed = np.append(samples, samples[0])
    steps = np.angle(closed[1:] * np.conj(closed[:-1]))
    return int(np.rint(steps.sum() / TWO_PI))


def _parabolic_peak(r: np.ndarray, p: np.ndarray, i: int) -> tuple[float, float]:
    # sub-bin vertex of the parabola through three equally spaced samples
    y0, y1, y2 = p[i - 1], p[i], p[i + 1]
    denom = y0 - 2 * y1 + y2
    if denom == 0.0:
        return r[i], y1
    delta = 0.5 * (y0 - y2) / denom
    dr = r[i + 1] - r[i]
    return r[i] + delta * dr, y1 - 0.25 * (y0 - y2) * delta


def fit_ansatz(f: ComplexField2D) -> VortexFit:
    """Recover (a, omega, R, V, sigma, m) from a field snapshot.

    R is the sub-bin argmax of the radial profile (parabolic interpolation);
    omega the e^-1 half-width of the profile around the peak; a the peak
    modulus divided by R^m; V the mean radial phase derivative over the
    annulus |r - R| <= omega/2; sigma the phase on the theta = 0 ray at the
    peak, with the m*theta and (r-R)V contributions removed, mod 2 pi.
    """
    g = f.grid
    if np.abs(f.values).max() == 0.0:
        raise ValueError("zero field")

    prof = radial_profile(f, n_bins=g.n)
    r = np.array([c for c, _ in prof])
    p = np.array([v for _, v in prof])
    i = int(np.argmax(p))
    if i < 1 or i > len(p) - 2:
        raise ValueError("no interior annular maximum")

    R_fit, p_peak = _parabolic_peak(r, p, i)

    # e^-1 half-width of the profile around the peak
    target = p_peak / np.e
    width_fallback = False

    def crossing(direction: int) -> float | None:
        j = i
        while 0 <= j + direction < len(p):
            j += direction
            if p[j] < target:
                # linear interpolation between j-direction and j
                r_hi, p_hi = r[j - direction], p[j - direction]
                frac = (p_hi - target) / (p_hi - p[j])
                return r_hi + frac * (r[j] - r_hi)
        return None

    r_minus = crossing(-1)
    r_plus = crossing(+1)
    if r_minus is None or r_plus is None:
        width_fallback = True
        weights = p
        mean_r = R_fit
        var = np.sum(weights * (r - mean_r) ** 2) / np.sum(weights)
        omega_fit = float(np.sqrt(2.0 * var))
    else:
        omega_fit = float(0.5 * (r_plus - r_minus))

    m_fit = winding_number(f, R_fit)

    a_fit = float(p_peak / R_fit ** abs(m_fit))

    # V: mean of Im(d_r f / f) over the annulus around the peak
    fx, fy = partial_derivatives(f)
    rmesh = g.r_mesh
    half = max(0.5 * omega_fit, 1.5 * g.dx)  # annulus must contain grid points
    annulus = np.abs(rmesh - R_fit) <= half
    annulus &= rmesh > 2.0 * g.dx  # radial direction undefined at the origin
    annulus &= np.abs(f.values) > 1e-12 * np.abs(f.values).max()
    if not np.any(annulus):
        raise ValueError("empty annulus around fitted radius")
    dr_f = (g.x_mesh[annulus] * fx[annulus] + g.y_mesh[annulus] * fy[annulus]) / rmesh[
        annulus
    ]
    V_fit = float(np.mean(np.imag(dr_f / f.values[annulus])))

    # sigma at the theta = 0 ray: nearest grid point to (R, 0)
    j0 = g.n // 2  # y = 0 column
    i_star = g.n // 2 + int(np.rint(R_fit / g.dx))
    i_star = min(max(i_star, 0), g.n - 1)
    x_star = g.xs[i_star]
    sigma_fit = float(
        (np.angle(f.values[i_star, j0]) - (x_star - R_fit) * V_fit) % TWO_PI
    )

    return VortexFit(
        a=a_fit,
        omega=omega_fit,
        R=float(R_fit),
        V=V_fit,
        sigma=sigma_fit,
        m=m_fit,
        width_fallback=width_fallback,
    )
