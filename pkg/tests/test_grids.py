import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moyal_vortex import (
    ComplexField2D,
    forward_transform,
    inverse_transform,
    make_grid,
    power,
    radial_profile,
    sample_radial,
)
from moyal_vortex.grids import spectral_power

from .conftest import smooth_field


class TestMakeGrid:
    def test_basic_spacing(self):
        g = make_grid(8, 4.0)
        assert g.dx == 1.0
        assert np.isclose(np.diff(np.sort(g.ks)), np.pi / 4.0).all()

    def test_dx_times_n_is_2L(self):
        g = make_grid(256, 8.0)
        assert g.dx == pytest.approx(0.0625)
        assert g.dx * g.n == 2 * g.L

    def test_odd_n_rejected(self):
        with pytest.raises(ValueError, match="even"):
            make_grid(7, 4.0)

    def test_small_n_rejected(self):
        with pytest.raises(ValueError):
            make_grid(4, 4.0)

    def test_nonpositive_L_rejected(self):
        with pytest.raises(ValueError):
            make_grid(16, 0.0)

    def test_wavenumbers_symmetric_except_most_negative(self):
        g = make_grid(16, 4.0)
        ks = np.sort(g.ks)
        # every mode except the single most-negative one has a partner
        assert np.allclose(ks[1:], -ks[1:][::-1])
        assert ks[0] == -np.pi * 8 / 4.0


class TestTransforms:
    def test_round_trip_random_field(self, grid128):
        rng = np.random.default_rng(0)
        f = ComplexField2D(
            grid128,
            rng.normal(size=(128, 128)) + 1j * rng.normal(size=(128, 128)),
        )
        back = inverse_transform(forward_transform(f))
        err = np.linalg.norm(back.values - f.values) / np.linalg.norm(f.values)
        assert err <= 1e-12

    def test_gaussian_dc_value(self, grid128):
        f = sample_radial(lambda r: np.exp(-(r**2)), 0, grid128)
        F = forward_transform(f)
        assert F.values[0, 0] == pytest.approx(np.pi, abs=1e-10)

    def test_gaussian_transform_near_k2(self, grid128):
        # uhat(k) = pi exp(-|k|^2/4) checked at grid wavenumbers near |k| = 2
        f = sample_radial(lambda r: np.exp(-(r**2)), 0, grid128)
        F = forward_transform(f)
        ks = grid128.ks
        for i, j in [(5, 0), (4, 3), (0, 5)]:
            k2 = ks[i] ** 2 + ks[j] ** 2
            assert abs(k2 - 4.0) < 1.0  # sanity: in the |k| ~ 2 shell
            assert F.values[i, j] == pytest.approx(
                np.pi * np.exp(-k2 / 4.0), abs=1e-8
            )

    def test_parseval(self, grid128):
        f = smooth_field(grid128, 2)
        assert spectral_power(forward_transform(f)) == pytest.approx(
            power(f), rel=1e-10
        )


class TestSampleRadial:
    def test_constant(self, grid64):
        f = sample_radial(lambda r: np.ones_like(r), 0, grid64)
        assert np.allclose(f.values, 1.0)

    def test_charge_one_on_x_axis(self, grid64):
        f = sample_radial(lambda r: r, 1, grid64)
        i = grid64.n // 2 + round(1.0 / grid64.dx)  # x = 1
        j = grid64.n // 2  # y = 0
        assert f.values[i, j] == pytest.approx(1.0 + 0.0j)

    def test_charge_two_on_y_axis(self, grid64):
        # theta = pi/2 on the positive y axis: phase exp(2 i theta) = -1
        f = sample_radial(lambda r: np.exp(-(r**2)), 2, grid64)
        i = grid64.n // 2
        j = grid64.n // 2 + round(1.0 / grid64.dx)  # y = 1
        assert f.values[i, j] == pytest.approx(-np.exp(-1.0), abs=1e-12)


class TestRadialProfile:
    def test_constant_field(self, grid64):
        f = sample_radial(lambda r: np.ones_like(r), 0, grid64)
        prof = radial_profile(f, 16)
        assert all(v == pytest.approx(1.0) for _, v in prof)

    def test_gaussian_decreasing(self, grid64):
        f = sample_radial(lambda r: np.exp(-(r**2)), 0, grid64)
        vals = [v for _, v in radial_profile(f, 32)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_ring_argmax_location(self, grid256):
        from moyal_vortex import VortexParams, build_ansatz

        vp = VortexParams(a=1.0, omega=0.5, R=3.0, V=0.0, sigma=0.0, m=1)
        f = build_ansatz(vp, grid256)
        prof = radial_profile(f, 64)
        centers = np.array([c for c, _ in prof])
        vals = np.array([v for _, v in prof])
        bin_width = grid256.L / 64
        assert abs(centers[np.argmax(vals)] - 3.0) <= bin_width

    def test_phase_decoration_invariant(self, grid64):
        f0 = sample_radial(lambda r: np.exp(-(r**2)), 0, grid64)
        f3 = sample_radial(lambda r: np.exp(-(r**2)), 3, grid64)
        p0 = radial_profile(f0, 24)
        p3 = radial_profile(f3, 24)
        assert np.allclose([v for _, v in p0], [v for _, v in p3])

    def test_min_bins(self, grid64):
        f = sample_radial(lambda r: np.exp(-(r**2)), 0, grid64)
        with pytest.raises(ValueError):
            radial_profile(f, 3)


class TestPower:
    def test_zero_field(self, grid64):
        f = ComplexField2D(grid64, np.zeros((64, 64), dtype=complex))
        assert power(f) == 0.0

    def test_gaussian_integral(self, grid256):
        f = sample_radial(lambda r: np.exp(-(r**2)), 0, grid256)
        assert power(f) == pytest.approx(np.pi / 2.0, abs=1e-10)

    @given(phase=st.floats(0.0, 2.0 * np.pi))
    @settings(max_examples=20, deadline=None)
    def test_global_phase_invariance(self, phase):
        g = make_grid(32, 6.0)
        f = smooth_field(g, 5)
        rotated = ComplexField2D(g, f.values * np.exp(1j * phase))
        assert power(rotated) == pytest.approx(power(f), rel=1e-12)


def test_field_rejects_nan(grid64):
    vals = np.zeros((64, 64), dtype=complex)
    vals[3, 3] = np.nan
    with pytest.raises(ValueError, match="finite"):
        ComplexField2D(grid64, vals)


def test_field_rejects_wrong_shape(grid64):
    with pytest.raises(ValueError):
        ComplexField2D(grid64, np.zeros((32, 32), dtype=complex))
