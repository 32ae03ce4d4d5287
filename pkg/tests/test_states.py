import numpy as np
import pytest
from scipy.special import eval_laguerre

from moyal_vortex import (
    ComplexField2D,
    MoyalParams,
    StationaryParams,
    calibrate_theta,
    laguerre,
    make_grid,
    phi_n,
    plateau,
    power,
    radial_profile,
    star,
    stationary_residual,
    wall,
)

from .conftest import rel_l2


class TestLaguerre:
    def test_low_degree_closed_forms(self):
        xs = np.linspace(-3, 10, 41)
        assert np.allclose(laguerre(0, xs), 1.0)
        assert np.allclose(laguerre(1, xs), 1.0 - xs)
        assert np.allclose(laguerre(2, xs), 1.0 - 2 * xs + xs**2 / 2)
        assert np.allclose(
            laguerre(3, xs), 1.0 - 3 * xs + 1.5 * xs**2 - xs**3 / 6
        )

    def test_point_values(self):
        assert laguerre(1, 2.0) == pytest.approx(-1.0)
        assert laguerre(2, 2.0) == pytest.approx(-1.0)

    def test_against_scipy_high_degree(self):
        xs = np.linspace(0.0, 400.0, 101)
        for n in (10, 50, 200):
            ours = laguerre(n, xs)
            ref = eval_laguerre(n, xs)
            assert np.abs(ours - ref).max() / np.abs(ref).max() <= 1e-10

    def test_negative_degree_rejected(self):
        with pytest.raises(ValueError):
            laguerre(-1, 0.0)


class TestPhiN:
    def test_center_values(self, grid128):
        assert phi_n(0, grid128).values[64, 64] == pytest.approx(2.0)
        assert phi_n(1, grid128).values[64, 64] == pytest.approx(-2.0)

    def test_phi0_norm(self, grid256):
        # integral phi_0^2 dx = 4 integral exp(-2 r^2) = 2 pi
        assert power(phi_n(0, grid256)) == pytest.approx(2 * np.pi, abs=1e-8)

    def test_small_grid_rejected(self):
        g = make_grid(32, 4.0)  # exp(-16) >> 1e-12
        with pytest.raises(ValueError, match="too small"):
            phi_n(0, g)


class TestPlateauWall:
    def test_p0_is_phi0(self, grid128):
        assert np.allclose(plateau(0, grid128).values, phi_n(0, grid128).values)

    def test_wall_requires_n_ge_1(self, grid128):
        with pytest.raises(ValueError):
            wall(0, grid128)

    def test_wall_peak_location(self, grid256):
        # |W_n| peaks at the Laguerre caustic of L_n(2 r^2), i.e. near
        # sqrt(2n), approaching it from below; at n = 4 the argmax sits at
        # r = 2.4809 = 1.2404 sqrt(4) (frozen from a fine 1-D scan).
        w4 = wall(4, grid256)
        prof = radial_profile(w4, 512)
        centers = np.array([c for c, _ in prof])
        vals = np.array([v for _, v in prof])
        argmax = centers[np.argmax(vals)]
        assert argmax == pytest.approx(2.4809, abs=2 * grid256.L / 512)

    def test_wall_peak_scaling_toward_sqrt_2n(self, grid256):
        # argmax(|W_n|)/sqrt(2n) rises toward 1 with n
        ratios = []
        for n in (4, 16):
            prof = radial_profile(wall(n, grid256), 512)
            centers = np.array([c for c, _ in prof])
            vals = np.array([v for _, v in prof])
            ratios.append(centers[np.argmax(vals)] / np.sqrt(2 * n))
        assert ratios[0] == pytest.approx(0.877, abs=0.02)
        assert ratios[1] == pytest.approx(0.950, abs=0.02)

    def test_plateau_profile_structure(self, grid256):
        # P_16 rings around the level 1 out to the disc edge near sqrt(32):
        # the fine profile on [0, 3.2] spans [0.60, 2.00] (the center value
        # is exactly 2 by the alternating sum), while annulus means over
        # coarse bins (width 0.5) stay within 25% of each other.
        p16 = plateau(16, grid256)
        assert p16.values[128, 128].real == pytest.approx(2.0, abs=1e-12)
        prof = radial_profile(p16, 512)
        centers = np.array([c for c, _ in prof])
        vals = np.array([v for _, v in prof])
        sel = centers <= 3.2
        assert vals[sel].min() == pytest.approx(0.60, abs=0.05)
        assert vals[sel].max() == pytest.approx(2.00, abs=0.05)
        coarse = radial_profile(p16, 16)
        cc = np.array([c for c, _ in coarse])
        cv = np.array([v for _, v in coarse])
        csel = cc <= 3.2
        variation = (cv[csel].max() - cv[csel].min()) / cv[csel].max()
        assert variation < 0.25


class TestStationaryResidual:
    def test_zero_field_rejected(self, grid128, theta1):
        z = ComplexField2D(grid128, np.zeros((128, 128), dtype=complex))
        with pytest.raises(ValueError, match="nonzero"):
            stationary_residual(z, StationaryParams(sigma=1.0, theta=theta1))

    def test_projector_kills_algebraic_part(self, grid128, theta1):
        # -sigma zeta = zeta*zeta*zeta with sigma = -1 and zeta = phi_0
        zeta = phi_n(0, grid128)
        res = stationary_residual(
            zeta, StationaryParams(sigma=-1.0, theta=theta1), drop_laplacian=True
        )
        assert res <= 1e-6

    def test_residual_quadratic_in_sigma(self, grid128, theta1):
        zeta = phi_n(0, grid128)
        sigmas = np.linspace(-3.0, 1.0, 9)
        res = [
            stationary_residual(
                zeta, StationaryParams(sigma=s, theta=theta1), drop_laplacian=True
            )
            for s in sigmas
        ]
        # squared residual is a parabola in sigma: unique minimum
        coeffs = np.polyfit(sigmas, np.square(res), 2)
        assert coeffs[0] > 0
        fitted = np.polyval(coeffs, sigmas)
        assert np.abs(fitted - np.square(res)).max() <= 1e-8
        assert -coeffs[1] / (2 * coeffs[0]) == pytest.approx(-1.0, abs=1e-6)


class TestCalibrateTheta:
    def test_theta_star_is_one(self):
        theta_star = calibrate_theta(1, make_grid(96, 8.0))
        assert theta_star == pytest.approx(1.0, abs=1e-3)

    def test_objective_larger_at_half_theta(self):
        from moyal_vortex.states import projector_defect

        g = make_grid(96, 8.0)
        assert projector_defect(0.5, 1, g) > projector_defect(1.0, 1, g)

    def test_grid_independence(self):
        t96 = calibrate_theta(0, make_grid(96, 8.0))
        t128 = calibrate_theta(0, make_grid(128, 8.0))
        assert abs(t96 - t128) <= 1e-3


class TestProjectorAlgebra:
    def test_orthogonality_low_modes(self, grid128, theta1):
        # phi_n * phi_m = delta_nm phi_n for n, m <= 2 at theta* = 1
        phis = [phi_n(n, grid128) for n in range(3)]
        norm = np.sqrt(power(phis[0]))
        for n in range(3):
            for m in range(3):
                s = star(phis[n], phis[m], theta1)
                expect = phis[n].values if n == m else 0.0
                err = np.sqrt(
                    power(ComplexField2D(grid128, s.values - expect))
                ) / np.sqrt(power(phis[n]))
                assert err <= 1e-6, (n, m, err)

    def test_plateau_idempotent(self, grid128, theta1):
        p1 = plateau(1, grid128)
        assert rel_l2(star(p1, p1, theta1), p1) <= 1e-6
