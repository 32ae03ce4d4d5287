"""Averaged-Lagrangian peak dynamics: the star-induced radial lattice.

The noncommutative self-interaction of a narrow ring vortex produces a
Peierls-Nabarro-type potential in the peak radius R.  For charge 1 its
argument is R^2/(2 theta) + pi/4, giving equilibrium radii that grow like
sqrt(n); for charge m ~ R the argument is R + pi/4 and the lattice is
equispaced.  Roots of the implemented force sit at

    charge 1:  R_k = sqrt(2 theta (k pi - pi/4)),
    charge m:  R_k = k pi - pi/4,

which carry the pi/4 phase; the classical reference radii sqrt(2 k pi theta)
(resp. spacing pi) are reported alongside for comparison, not asserted.
Stability alternates, k = 1 stable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .moyal import MoyalParams

_EIGHT_PI_CUBED = (8.0 * np.pi) ** 3


class LatticeVariant(enum.Enum):
    CHARGE1_QUADRATIC = "charge1_quadratic"
    CHARGEM_EQUISPACED = "chargem_equispaced"


@dataclass(frozen=True)
class ModulationState:
    """Instantaneous ansatz parameters entering the averaged Lagrangian."""

    t: float
    a: float
    omega: float
    R: float
    V: float
    sigma: float

    def __post_init__(self) -> None:
        if not (self.a > 0 and self.omega > 0 and self.R > 0):
            raise ValueError("a, omega, R must be positive")


@dataclass(frozen=True)
class FixedPoint:
    """Equilibrium radius of the peak dynamics with its stability label."""

    index: int
    R: float
    stability: str  # "stable" | "unstable"
    paper_R: float


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested relative error."""

    def __init__(self, achieved: float, requested: float):
        super().__init__(
            f"quadrature error {achieved:.3e} exceeds requested {requested:.3e}"
        )
        self.achieved = achieved
        self.requested = requested


def _envelope_alpha(V: float) -> float:
    # Gaussian suppression exponent coefficient: 2 + (1+V)^2/2 + 5(1-V)^2/8
    return 2.0 + 0.5 * (1.0 + V) ** 2 + 0.625 * (1.0 - V) ** 2


def _pn_argument(R: float, p: MoyalParams, variant: LatticeVariant) -> tuple[float, float]:
    """Cosine argument and its R-derivative for the chosen lattice variant."""
    if variant is LatticeVariant.CHARGE1_QUADRATIC:
        if p.theta <= 0:
            raise ValueError("charge-1 lattice requires theta > 0")
        return R * R / (2.0 * p.theta) + 0.25 * np.pi, R / p.theta
    return R + 0.25 * np.pi, 1.0


def pn_potential(
    R: float,
    omega: float,
    V: float,
    p: MoyalParams,
    variant: LatticeVariant = LatticeVariant.CHARGE1_QUADRATIC,
) -> float:
    """Peierls-Nabarro potential F(R, omega, V).

    cos(R^2/(2 theta) + pi/4) / (4 sqrt(R)) times the Gaussian width
    suppression; the charge-m variant replaces the argument by R + pi/4.
    """
    if R <= 0:
        raise ValueError("R must be positive")
    arg, _ = _pn_argument(R, p, variant)
    alpha = _envelope_alpha(V)
    return float(
        0.25 / np.sqrt(R) * np.cos(arg) * np.exp(-(omega**2) * R * R * alpha)
    )


def pn_potential_grad(
    R: float,
    omega: float,
    V: float,
    p: MoyalParams,
    variant: LatticeVariant = LatticeVariant.CHARGE1_QUADRATIC,
) -> tuple[float, float, float, float]:
    """(F, dF/dR, dF/domega, dF/dV), all in closed form."""
    if R <= 0:
        raise ValueError("R must be positive")
    arg, darg = _pn_argument(R, p, variant)
    alpha = _envelope_alpha(V)
    dalpha = (1.0 + V) - 1.25 * (1.0 - V)
    env = np.exp(-(omega**2) * R * R * alpha)
    pref = 0.25 / np.sqrt(R)
    F = pref * np.cos(arg) * env
    dF_dR = (
        -0.125 / R**1.5 * np.cos(arg)
        - pref * np.sin(arg) * darg
        - pref * np.cos(arg) * 2.0 * omega**2 * R * alpha
    ) * env
    dF_domega = -pref * np.cos(arg) * 2.0 * omega * R * R * alpha * env
    dF_dV = -pref * np.cos(arg) * omega**2 * R * R * dalpha * env
    return float(F), float(dF_dR), float(dF_domega), float(dF_dV)


def lstar_numeric(
    a: float, omega: float, R: float, V: float, p: MoyalParams
) -> float:
    """Star-product Lagrangian term as the k-integral, by adaptive quadrature.

    (a^4 R^{5/2} omega^2 / ((2 pi)^3 theta)) * integral of
    exp(-omega^2 k^2 alpha) sin^2(k^2 theta/2) sin^4(k R) k dk, truncated
    where the Gaussian weight falls below 1e-16.  Requested relative
    quadrature error 1e-8; failure raises QuadratureError.
    """
    if omega <= 0 or R <= 0:
        raise ValueError("omega and R must be positive")
    if p.theta <= 0:
        raise ValueError("requires theta > 0")
    if a == 0.0:
        return 0.0
    alpha = _envelope_alpha(V)
    beta = omega**2 * alpha
    k_cut = np.sqrt(-np.log(1e-16) / beta)
    th = p.theta

    def integrand(k: float) -> float:
        return (
            np.exp(-beta * k * k)
            * np.sin(0.5 * k * k * th) ** 2
            * np.sin(k * R) ** 4
            * k
        )

    oscillations = k_cut * R / np.pi + k_cut**2 * th / (2.0 * np.pi)
    limit = int(200 + 6 * oscillations)
    val, abserr = quad(integrand, 0.0, k_cut, limit=limit, epsabs=0.0, epsrel=1e-10)
    rel = abserr / max(abs(val), 1e-300)
    if rel > 1e-8:
        raise QuadratureError(achieved=rel, requested=1e-8)
    pref = a**4 * R**2.5 * omega**2 / ((2.0 * np.pi) ** 3 * th)
    return float(pref * val)


def lstar_asymptotic(
    a: float,
    omega: float,
    R: float,
    V: float,
    p: MoyalParams,
    variant: LatticeVariant = LatticeVariant.CHARGE1_QUADRATIC,
) -> float:
    """Stationary-phase closed form: -(a^4/((8 pi)^3 theta)) omega^2 R^{5/2}
    (1/(2 omega^2) + F)."""
    if omega <= 0 or R <= 0:
        raise ValueError("omega and R must be positive")
    if p.theta <= 0:
        raise ValueError("requires theta > 0")
    F = pn_potential(R, omega, V, p, variant)
    return float(
        -(a**4) / (_EIGHT_PI_CUBED * p.theta) * omega**2 * R**2.5
        * (0.5 / omega**2 + F)
    )


def avg_lagrangian(
    state: ModulationState,
    dsigma_dt: float,
    dR_dt: float,
    p: MoyalParams,
    variant: LatticeVariant = LatticeVariant.CHARGE1_QUADRATIC,
) -> float:
    """The final averaged Lagrangian, term by term:

    2 a^2 w R^3 sigma' + 2 a^2 w R + 2 a^2 w R^3 (V R' - V^2/2)
    + 2 a^2 R^3/(3 w) - a^4 R/((8 pi)^3 theta) - F(R, w, V).
    """
    a, w, R, V = state.a, state.omega, state.R, state.V
    F = pn_potential(R, w, V, p, variant)
    return float(
        2.0 * a**2 * w * R**3 * dsigma_dt
        + 2.0 * a**2 * w * R
        + 2.0 * a**2 * w * R**3 * (V * dR_dt - 0.5 * V**2)
        + 2.0 * a**2 * R**3 / (3.0 * w)
        - a**4 * R / (_EIGHT_PI_CUBED * p.theta)
        - F
    )


def modulation_residuals(
    state: ModulationState,
    rates: tuple[float, float, float, float],
    p: MoyalParams,
    variant: LatticeVariant = LatticeVariant.CHARGE1_QUADRATIC,
) -> np.ndarray:
    """Left-hand sides of the five variational equations.

    rates = time derivatives of (a^2 w R, sigma, R, a^2 w R^3 V).  A steady
    state zeroes residuals 2-5; residual 1 vanishes identically for constant
    (a, w, R).  F-derivatives are the closed forms of pn_potential_grad.
    """
    a, w, R, V = state.a, state.omega, state.R, state.V
    d_awR, dsigma, dR, d_awR3V = rates
    F, dF_dR, dF_dw, dF_dV = pn_potential_grad(R, w, V, p, variant)

    r_sigma = 2.0 * d_awR
    # F does not depend on a; the dF/da term is written out (it is zero)
    # so the residual mirrors the variational equation exactly.
    dF_da = 0.0
    r_a = (
        4.0 * a * w * R**3 * dsigma
        + 4.0 * a * R**3 / (3.0 * w)
        - R * a**3 / (2.0 * p.theta)
        + dF_da
    )
    r_w = 2.0 * a**2 * R**3 * dsigma - 2.0 * a**2 * R**3 / (3.0 * w**2) + dF_dw
    r_V = dR - V - dF_dV
    dL_dR = (
        6.0 * a**2 * w * R**2 * dsigma
        + 2.0 * a**2 * w
        + 6.0 * a**2 * w * R**2 * (V * dR - 0.5 * V**2)
        + 2.0 * a**2 * R**2 / w
        - a**4 / (_EIGHT_PI_CUBED * p.theta)
        - dF_dR
    )
    r_R = 2.0 * d_awR3V + dL_dR
    return np.array([r_sigma, r_a, r_w, r_V, r_R])


def amplitude_width(omega: float, p: MoyalParams) -> float:
    """Steady amplitude-width relation a = 32 sqrt(theta/(3 omega))."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    return float(32.0 * np.sqrt(p.theta / (3.0 * omega)))


def peak_force(
    R: float,
    a: float,
    omega: float,
    p: MoyalParams,
    variant: LatticeVariant = LatticeVariant.CHARGE1_QUADRATIC,
) -> float:
    """d(RV)/dt of the frozen-width peak equation:
    (a^2 omega^3 / (2 theta^2)) R^3 sin(arg)."""
    if R <= 0:
        raise ValueError("R must be positive")
    if p.theta <= 0:
        raise ValueError("requires theta > 0")
    arg, _ = _pn_argument(R, p, variant)
    return float(a**2 * omega**3 / (2.0 * p.theta**2) * R**3 * np.sin(arg))


def peak_rhs(
    R: float,
    V: float,
    a: float,
    omega: float,
    p: MoyalParams,
    variant: LatticeVariant = LatticeVariant.CHARGE1_QUADRATIC,
) -> tuple[float, float]:
    """(dR/dt, d(RV)/dt) with a and omega frozen (quasi-static regime)."""
    return V, peak_force(R, a, omega, p, variant)


@dataclass
class PeakTrajectory:
    """evolve_peak output: (t, R, V) series plus a conserved-energy diagnostic.

    energy_t / energy hold 0.5 (R V)^2 + U(R) at <= 513 decimated samples,
    with U the potential whose negative gradient (times R) is the force;
    its drift monitors integrator error.  aborted marks blow-up (R <= 0 or
    non-finite state) with the series truncated at the last valid sample.
    """

    t: np.ndarray
    R: np.ndarray
    V: np.ndarray
    energy_t: np.ndarray
    energy: np.ndarray
    aborted: bool = False


def evolve_peak(
    R0: float,
    V0: float,
    a: float,
    omega: float,
    p: MoyalParams,
    variant: LatticeVariant = LatticeVariant.CHARGE1_QUADRATIC,
    dt: float = 1e-2,
    t_end: float = 10.0,
) -> PeakTrajectory:
    """Fixed-step RK4 on (R, P = R V): R' = P/R, P' = force(R).

    Accuracy guidance: keep dt * sqrt(max|dforce/dR| / R) below ~0.1 over
    the visited R range (hard RK4 stability sits near 2.8).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    n_steps = int(round(t_end / dt))
    t = np.empty(n_steps + 1)
    Rs = np.empty(n_steps + 1)
    Vs = np.empty(n_steps + 1)
    R, P = float(R0), float(R0 * V0)
    t[0], Rs[0], Vs[0] = 0.0, R, P / R
    aborted = False
    last = n_steps

    def rhs(R_: float, P_: float) -> tuple[float, float]:
        return P_ / R_, peak_force(R_, a, omega, p, variant)

    for i in range(1, n_steps + 1):
        k1R, k1P = rhs(R, P)
        k2R, k2P = rhs(R + 0.5 * dt * k1R, P + 0.5 * dt * k1P)
        k3R, k3P = rhs(R + 0.5 * dt * k2R, P + 0.5 * dt * k2P)
        k4R, k4P = rhs(R + dt * k3R, P + dt * k3P)
        R = R + dt / 6.0 * (k1R + 2 * k2R + 2 * k3R + k4R)
        P = P + dt / 6.0 * (k1P + 2 * k2P + 2 * k3P + k4P)
        if not (np.isfinite(R) and np.isfinite(P)) or R <= 0:
            aborted = True
            last = i - 1
            break
        t[i], Rs[i], Vs[i] = i * dt, R, P / R

    t, Rs, Vs = t[: last + 1], Rs[: last + 1], Vs[: last + 1]

    # decimated conserved-energy diagnostic: H = P^2/2 - int_{R0}^{R} s*force(s) ds
    stride = max(1, len(t) // 512)
    idx = np.arange(0, len(t), stride)
    if idx[-1] != len(t) - 1:
        idx = np.append(idx, len(t) - 1)
    energy = np.empty(len(idx))
    for j, i in enumerate(idx):
        pot, _ = quad(
            lambda s: -s * peak_force(s, a, omega, p, variant), R0, Rs[i], limit=400
        )
        energy[j] = 0.5 * (Rs[i] * Vs[i]) ** 2 + pot
    return PeakTrajectory(
        t=t, R=Rs, V=Vs, energy_t=t[idx], energy=energy, aborted=aborted
    )


def fixed_points(
    p: MoyalParams,
    n_max: int,
    variant: LatticeVariant = LatticeVariant.CHARGE1_QUADRATIC,
) -> list[FixedPoint]:
    """First n_max roots of the implemented force, by bisection.

    Stability comes from the sign of dforce/dR at the root (negative =
    stable); paper_R carries the classical reference sqrt(2 k pi theta)
    (charge 1) or k pi (charge m) for comparison.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if p.theta <= 0:
        raise ValueError("requires theta > 0")

    def force(R: float) -> float:
        return peak_force(R, 1.0, 1.0, p, variant)

    out: list[FixedPoint] = []
    for k in range(1, n_max + 1):
        if variant is LatticeVariant.CHARGE1_QUADRATIC:
            lo = np.sqrt(2.0 * p.theta * (k * np.pi - 0.7499 * np.pi))
            hi = np.sqrt(2.0 * p.theta * (k * np.pi + 0.2499 * np.pi))
            paper_R = np.sqrt(2.0 * k * np.pi * p.theta)
        else:
            lo = k * np.pi - 0.7499 * np.pi
            hi = k * np.pi + 0.2499 * np.pi
            paper_R = k * np.pi
        flo, fhi = force(lo), force(hi)
        if flo * fhi >= 0:
            raise RuntimeError(f"root {k} not bracketed in [{lo}, {hi}]")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            fmid = force(mid)
            if flo * fmid <= 0:
                hi, fhi = mid, fmid
            else:
                lo, flo = mid, fmid
            if hi - lo < 1e-13 * max(1.0, mid):
                break
        root = 0.5 * (lo + hi)
        h = 1e-6 * max(1.0, root)
        slope = (force(root + h) - force(root - h)) / (2.0 * h)
        out.append(
            FixedPoint(
                index=k,
                R=float(root),
                stability="stable" if slope < 0 else "unstable",
                paper_R=float(paper_R),
            )
        )
    return out


def landau_cell_areas(fps: list[FixedPoint]) -> list[float]:
    """Annular cell areas A_n = 2 pi R_n (R_{n+1} - R_n) from consecutive radii."""
    if len(fps) < 2:
        raise ValueError("need at least 2 fixed points")
    return [
        float(2.0 * np.pi * a.R * (b.R - a.R)) for a, b in zip(fps[:-1], fps[1:])
    ]
