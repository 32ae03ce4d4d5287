import numpy as np
import pytest
from scipy.integrate import quad

from moyal_vortex import (
    ComplexField2D,
    VortexParams,
    build_ansatz,
    fit_ansatz,
    make_grid,
    power,
    winding_number,
)


@pytest.fixture(scope="module")
def grid_fit():
    return make_grid(256, 10.0)


@pytest.fixture(scope="module")
def reference_vortex(grid_fit):
    vp = VortexParams(a=1.0, omega=0.5, R=5.0, V=0.1, sigma=0.3, m=1)
    return vp, build_ansatz(vp, grid_fit)


class TestVortexParams:
    def test_sigma_reduced_mod_2pi(self):
        vp = VortexParams(a=1.0, omega=0.5, R=3.0, V=0.0, sigma=7.0, m=1)
        assert 0.0 <= vp.sigma < 2 * np.pi
        assert vp.sigma == pytest.approx(7.0 - 2 * np.pi)

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            VortexParams(a=-1.0, omega=0.5, R=3.0, V=0.0, sigma=0.0, m=1)
        with pytest.raises(ValueError):
            VortexParams(a=1.0, omega=0.5, R=3.0, V=0.0, sigma=0.0, m=0)


class TestBuildAnsatz:
    def test_domain_too_small(self):
        g = make_grid(64, 4.0)
        vp = VortexParams(a=1.0, omega=0.5, R=3.0, V=0.0, sigma=0.0, m=1)
        with pytest.raises(ValueError, match="too small"):
            build_ansatz(vp, g)

    def test_value_at_peak_on_x_axis(self, grid_fit):
        # at r = R, theta = 0 the Gaussian and V exponents vanish
        vp = VortexParams(a=1.3, omega=0.5, R=5.0, V=0.7, sigma=0.4, m=2)
        f = build_ansatz(vp, grid_fit)
        i = grid_fit.n // 2 + round(5.0 / grid_fit.dx)
        j = grid_fit.n // 2
        expected = 1.3 * 5.0**2 * np.exp(1j * 0.4)
        assert f.values[i, j] == pytest.approx(expected, rel=1e-12)

    def test_efold_at_R_plus_minus_omega(self, grid_fit):
        vp = VortexParams(a=1.0, omega=0.5, R=5.0, V=0.0, sigma=0.0, m=1)
        f = build_ansatz(vp, grid_fit)
        j = grid_fit.n // 2
        def mag_at(x):
            i = grid_fit.n // 2 + round(x / grid_fit.dx)
            return abs(f.values[i, j])
        # |u|(R +/- omega) = e^-1 * (r/R) * |u|(R) along the ray
        for x in (4.5, 5.5):
            assert mag_at(x) == pytest.approx(
                np.exp(-1.0) * x / 5.0 * mag_at(5.0), rel=1e-10
            )

    def test_power_against_radial_quadrature(self, grid_fit):
        vp = VortexParams(a=1.0, omega=0.5, R=5.0, V=0.1, sigma=0.0, m=1)
        f = build_ansatz(vp, grid_fit)
        oracle = 2 * np.pi * quad(
            lambda r: r**3 * np.exp(-2 * ((r - 5.0) / 0.5) ** 2), 0.0, 10.0
        )[0]
        assert power(f) == pytest.approx(oracle, rel=1e-6)


class TestWindingNumber:
    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_charge_recovered(self, grid_fit, m):
        vp = VortexParams(a=1.0, omega=0.5, R=5.0, V=0.0, sigma=0.0, m=m)
        f = build_ansatz(vp, grid_fit)
        assert winding_number(f, 5.0) == m

    def test_conjugation_flips_sign(self, grid_fit, reference_vortex):
        _, f = reference_vortex
        fc = ComplexField2D(grid_fit, np.conj(f.values))
        assert winding_number(fc, 5.0) == -1

    def test_zero_winding_envelope_invariance(self, grid_fit, reference_vortex):
        # multiplying by a smooth nonvanishing zero-winding factor changes nothing
        _, f = reference_vortex
        envelope = 1.0 + 0.5 * np.exp(-grid_fit.r_mesh**2 / 4.0)
        g = ComplexField2D(grid_fit, f.values * envelope)
        assert winding_number(g, 5.0) == 1

    def test_near_zero_loop_rejected(self, grid_fit):
        vp = VortexParams(a=1.0, omega=0.4, R=5.0, V=0.0, sigma=0.0, m=1)
        f = build_ansatz(vp, grid_fit)
        vals = f.values.copy()
        vals[np.abs(grid_fit.r_mesh - 2.0) < 3 * grid_fit.dx] = 0.0
        with pytest.raises(ValueError, match="zero"):
            winding_number(ComplexField2D(grid_fit, vals), 2.0)


class TestFitAnsatz:
    def test_round_trip_within_2_percent(self, grid_fit, reference_vortex):
        vp, f = reference_vortex
        fit = fit_ansatz(f)
        assert not fit.width_fallback
        assert fit.m == vp.m
        assert fit.a == pytest.approx(vp.a, rel=0.02)
        assert fit.omega == pytest.approx(vp.omega, rel=0.02)
        assert fit.R == pytest.approx(vp.R, rel=0.02)
        assert fit.V == pytest.approx(vp.V, rel=0.02)
        assert fit.sigma == pytest.approx(vp.sigma, abs=0.02 * 2 * np.pi)

    def test_round_trip_other_charges(self, grid_fit):
        for m in (2, 3):
            vp = VortexParams(a=0.8, omega=0.6, R=4.5, V=-0.2, sigma=1.1, m=m)
            fit = fit_ansatz(build_ansatz(vp, grid_fit))
            assert fit.m == m
            assert fit.R == pytest.approx(vp.R, rel=0.02)
            assert fit.omega == pytest.approx(vp.omega, rel=0.03)

    def test_noise_robust_radius(self, grid_fit, reference_vortex):
        vp, f = reference_vortex
        rng = np.random.default_rng(7)
        scale = 1e-3 * np.abs(f.values).max()
        noisy = ComplexField2D(
            grid_fit,
            f.values
            + scale
            * (rng.normal(size=f.values.shape) + 1j * rng.normal(size=f.values.shape)),
        )
        assert fit_ansatz(noisy).R == pytest.approx(vp.R, rel=0.01)

    def test_zero_field_rejected(self, grid_fit):
        z = ComplexField2D(grid_fit, np.zeros((256, 256), dtype=complex))
        with pytest.raises(ValueError, match="zero"):
            fit_ansatz(z)

    def test_no_interior_maximum_rejected(self, grid_fit):
        from moyal_vortex import sample_radial

        disc = sample_radial(lambda r: np.exp(-(r**2)), 0, grid_fit)
        with pytest.raises(ValueError, match="maximum"):
            fit_ansatz(disc)

    def test_width_fallback_flag_for_wide_ring(self):
        # omega comparable to R: the profile never drops to e^-1 inside
        # the bin range on the left, triggering the second-moment fallback
        g = make_grid(128, 8.0)
        vp = VortexParams(a=1.0, omega=1.8, R=1.5, V=0.0, sigma=0.0, m=1)
        fit = fit_ansatz(build_ansatz(vp, g))
        assert fit.width_fallback
        assert fit.omega > 0

    def test_fit_params_property(self, grid_fit, reference_vortex):
        _, f = reference_vortex
        fit = fit_ansatz(f)
        vp = fit.params
        assert isinstance(vp, VortexParams)
        assert vp.R == fit.R
