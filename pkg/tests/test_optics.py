import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spdc_studio import sellmeier
from spdc_studio.errors import ConfigError
from spdc_studio.optics import (C_LIGHT, TWO_PI_C, CrystalSpec, DkMapping,
                                FrequencyGrid, PmfMode, PolingPattern,
                                PulseShape, PumpSpec, compute_jsa,
                                coupling_coefficient, delta_k,
                                design_lobe_wavelengths, peak_power,
                                pmf_analytic, pmf_from_domains, pump_envelope,
                                temporal_walkoff, transform_limited_fwhm,
                                uniform_grating, wavevector)


class TestSellmeier:
    def test_y_axis_matches_dispersion_formula(self):
        # independent re-evaluation of the dispersion relation at 1 um
        lam_um = 1.0
        n2 = 2.09930 + 0.922683 / (1 - 0.0467695 / lam_um**2) \
            - 0.0138408 * lam_um**2
        assert sellmeier.refractive_index(1e-6, "y") == pytest.approx(
            math.sqrt(n2), abs=1e-12)

    def test_z_axis_matches_dispersion_formula(self):
        lam_um = 1.55
        n2 = 2.12725 + 1.18431 / (1 - 0.0514852 / lam_um**2) \
            + 0.6603 / (1 - 100.00507 / lam_um**2) - 0.00968956 * lam_um**2
        assert sellmeier.refractive_index(1.55e-6, "z") == pytest.approx(
            math.sqrt(n2), abs=1e-12)

    def test_birefringence_sign(self):
        # KTP is positive biaxial: n_z > n_y through the telecom band
        for lam in (0.78e-6, 1.55e-6):
            assert sellmeier.refractive_index(lam, "z") > \
                sellmeier.refractive_index(lam, "y")

    def test_group_index_matches_finite_difference(self):
        lam = 1.56e-6
        h = 1e-12
        for axis in ("y", "z"):
            n = sellmeier.refractive_index(lam, axis)
            dn = (sellmeier.refractive_index(lam + h, axis)
                  - sellmeier.refractive_index(lam - h, axis)) / (2 * h)
            expected = n - lam * dn
            assert sellmeier.group_index(lam, axis) == pytest.approx(
                expected, rel=1e-6)

    def test_group_exceeds_phase_index(self):
        # normal dispersion in the transparency window
        for lam in (0.78e-6, 1.2e-6, 1.55e-6):
            for axis in ("y", "z"):
                assert sellmeier.group_index(lam, axis) > \
                    sellmeier.refractive_index(lam, axis)

    def test_validity_range_enforced(self):
        with pytest.raises(ConfigError):
            sellmeier.refractive_index(0.2e-6, "y")
        with pytest.raises(ConfigError):
            sellmeier.refractive_index(4.0e-6, "z")
        with pytest.raises(ConfigError):
            sellmeier.refractive_index(1.0e-6, "x")


class TestDeltaK:
    def test_wavevector_definition(self):
        lam = 1.55e-6
        omega = TWO_PI_C / lam
        n = sellmeier.refractive_index(lam, "y")
        assert wavevector(omega, "y") == pytest.approx(n * omega / C_LIGHT,
                                                       rel=1e-14)

    def test_degenerate_mismatch_small_and_frozen(self, default_crystal,
                                                  default_pump):
        w0 = default_pump.center_omega / 2
        dk = float(delta_k(w0, w0, default_crystal))
        # the grating nearly closes the momentum balance at degeneracy
        assert abs(dk) < 3000.0
        assert dk == pytest.approx(537.232, abs=0.05)

    def test_grating_term_vanishes_for_long_period(self, default_pump):
        w0 = default_pump.center_omega / 2
        bare = wavevector(2 * w0, "y") - wavevector(w0, "y") \
            - wavevector(w0, "z")
        crystal = CrystalSpec(poling_period=1e6)
        assert float(delta_k(w0, w0, crystal)) == pytest.approx(
            bare, rel=1e-9, abs=1e-4)


class TestPumpEnvelope:
    @pytest.mark.parametrize("shape", [PulseShape.SECH2, PulseShape.GAUSSIAN])
    def test_intensity_fwhm(self, shape):
        pump = PumpSpec(pulse_shape=shape)
        w0 = pump.center_omega
        half = pump.bandwidth_omega / 2
        peak = abs(pump_envelope(np.array([w0]), pump))[0] ** 2
        at_edge = abs(pump_envelope(np.array([w0 + half]), pump))[0] ** 2
        assert at_edge == pytest.approx(peak / 2, rel=1e-9)

    def test_symmetric(self):
        pump = PumpSpec()
        w0 = pump.center_omega
        d = 3e12
        left = pump_envelope(np.array([w0 - d]), pump)
        right = pump_envelope(np.array([w0 + d]), pump)
        assert left == pytest.approx(right, rel=1e-12)


class TestPmf:
    def test_antisymmetric_in_mismatch(self):
        nu = np.linspace(-6000, 6000, 201)
        phi = pmf_analytic(nu, 333.0, 2700.0)
        assert np.allclose(phi, -phi[::-1], atol=1e-18)
        assert pmf_analytic(np.array([0.0]), 333.0, 2700.0)[0] == 0.0

    def test_lobes_peak_near_plus_minus_a(self):
        nu = np.linspace(-6000, 6000, 24001)
        phi = pmf_analytic(nu, 333.0, 2700.0)
        assert nu[np.argmax(phi)] == pytest.approx(2700.0, abs=5.0)
        assert nu[np.argmin(phi)] == pytest.approx(-2700.0, abs=5.0)

    def test_single_domain_matches_sinc(self):
        # length-normalized, so the analytic form carries no L prefactor
        length = 2e-3
        pattern = PolingPattern(length=length)
        dk = np.linspace(-8000.0, 8000.0, 41)
        got = pmf_from_domains(pattern, dk)
        x = dk * length / 2
        expected = np.sinc(x / np.pi) * np.exp(1j * x)
        assert np.allclose(got, expected, rtol=1e-9, atol=1e-12)

    def test_uniform_grating_first_order_amplitude(self):
        # a square-wave grating converts a fraction 2/pi of a uniform
        # crystal's response at the quasi-phase-matched mismatch
        length, period = 4e-3, 46e-6
        pattern = uniform_grating(length, period)
        peak = abs(complex(pmf_from_domains(pattern,
                                            np.array([-2 * np.pi / period]))[0]))
        assert peak == pytest.approx(2 / np.pi, rel=0.01)

    def test_scalar_input(self):
        pattern = PolingPattern(length=1e-3)
        assert pmf_from_domains(pattern, 0.0) == pytest.approx(1.0)


class TestComputeJsa:
    def test_normalized(self, default_jsa):
        assert default_jsa.norm_squared == pytest.approx(1.0, abs=1e-9)

    def test_grid_too_coarse_rejected(self, default_crystal, default_pump):
        grid = FrequencyGrid.wavelength_window(1500e-9, 1620e-9, 32)
        with pytest.raises(ConfigError, match="samples"):
            compute_jsa(grid, default_crystal, default_pump)

    def test_minimum_passing_grid(self, default_crystal, default_pump):
        grid = FrequencyGrid.wavelength_window(1500e-9, 1620e-9, 64)
        jsa = compute_jsa(grid, default_crystal, default_pump)
        assert jsa.norm_squared == pytest.approx(1.0, abs=1e-9)

    def test_near_antisymmetric_under_swap(self, default_jsa):
        # swapping signal and idler is close to a pure sign flip; the small
        # deficit comes from the group-index difference between the two
        # polarizations and is what the exchange-overlap metric measures
        amp = default_jsa.amplitude
        grid = default_jsa.grid
        w = np.outer(grid.signal_weights, grid.idler_weights)
        overlap = np.sum(np.conj(amp) * (-amp.T) * w)
        assert overlap.real > 0.995
        assert abs(overlap.imag) < 1e-9

    def test_raw_mapping_differs(self, default_crystal, default_pump):
        grid = FrequencyGrid.wavelength_window(1500e-9, 1620e-9, 256)
        design = compute_jsa(grid, default_crystal, default_pump,
                             dk_mapping=DkMapping.DESIGN)
        raw = compute_jsa(grid, default_crystal, default_pump,
                          dk_mapping=DkMapping.RAW)
        w = np.outer(grid.signal_weights, grid.idler_weights)
        overlap = abs(np.sum(np.conj(design.amplitude) * raw.amplitude * w))
        assert overlap < 0.9

    def test_from_domains_mode_runs(self, default_crystal, default_pump):
        grid = FrequencyGrid.wavelength_window(1500e-9, 1620e-9, 128)
        jsa = compute_jsa(grid, default_crystal, default_pump,
                          pmf_mode=PmfMode.FROM_DOMAINS)
        assert jsa.norm_squared == pytest.approx(1.0, abs=1e-9)


class TestDesignLobes:
    def test_positions(self, default_crystal, default_pump):
        lam1, lam2 = design_lobe_wavelengths(default_crystal, default_pump)
        assert lam1 * 1e9 == pytest.approx(1548.26, abs=0.05)
        assert lam2 * 1e9 == pytest.approx(1571.89, abs=0.05)

    def test_energy_conserving_pair(self, default_crystal, default_pump):
        lam1, lam2 = design_lobe_wavelengths(default_crystal, default_pump)
        wp = default_pump.center_omega
        # the idler partner of the short lobe is the long lobe, closely
        partner = TWO_PI_C / (wp - TWO_PI_C / lam1)
        assert partner == pytest.approx(lam2, rel=2e-4)


class TestWalkoff:
    def test_perfect_compensation_for_flat_dispersion(self):
        # with wavelength-independent group indices, a compensator of half
        # the crystal length cancels the walk-off exactly
        crystal = CrystalSpec(length=4e-3, compensation_length=2e-3)

        def flat(lam, axis):
            return {"y": 1.7, "z": 1.8}[axis]

        assert temporal_walkoff(crystal, 1548e-9, 1572e-9,
                                group_index_fn=flat) == 0.0

    def test_uncompensated_magnitude(self):
        crystal = CrystalSpec(compensation_length=0.0)
        tau = temporal_walkoff(crystal, 1548e-9, 1572e-9)
        assert abs(tau) * 1e15 == pytest.approx(588.9, abs=2.0)

    def test_residual_few_fs(self, default_crystal):
        tau = temporal_walkoff(default_crystal, 1548e-9, 1572e-9)
        assert abs(tau) * 1e15 == pytest.approx(3.4166, abs=0.01)


class TestPowerBookkeeping:
    def test_peak_power_arithmetic(self):
        pump = PumpSpec()
        expected = 0.88 * 0.620 / (76e6 * 90e-15)
        assert peak_power(pump, 90e-15) == pytest.approx(expected, rel=1e-12)

    def test_transform_limited_duration(self):
        # 7 nm at 780 nm, sech^2: about 91 fs
        assert transform_limited_fwhm(PumpSpec()) * 1e15 == pytest.approx(
            91.3, abs=1.0)

    def test_kappa_scaling(self):
        ref = (0.050, 0.5)
        assert coupling_coefficient(0.050, ref) == pytest.approx(0.5)
        assert coupling_coefficient(0.620, ref) == pytest.approx(
            0.5 * math.sqrt(0.620 / 0.050), rel=1e-12)
        assert coupling_coefficient(0.0, ref) == 0.0

    @given(st.floats(min_value=1e-4, max_value=10.0),
           st.floats(min_value=1e-4, max_value=10.0))
    @settings(max_examples=30, deadline=None)
    def test_kappa_monotone(self, p1, p2):
        ref = (0.050, 0.5)
        k1, k2 = coupling_coefficient(p1, ref), coupling_coefficient(p2, ref)
        assert (p1 <= p2) == (k1 <= k2)


class TestValidation:
    def test_bad_pump(self):
        with pytest.raises(ConfigError):
            PumpSpec(center_wavelength=-1.0)
        with pytest.raises(ConfigError):
            PumpSpec(bandwidth_fwhm=0.0)

    def test_bad_crystal(self):
        with pytest.raises(ConfigError):
            CrystalSpec(length=0.0)
        with pytest.raises(ConfigError):
            CrystalSpec(compensation_length=-1e-3)

    def test_bad_pattern(self):
        with pytest.raises(ConfigError):
            PolingPattern(length=1e-3, boundaries=(2e-3,))
        with pytest.raises(ConfigError):
            PolingPattern(length=1e-3, boundaries=(5e-4, 4e-4))

    def test_grid_must_ascend(self):
        with pytest.raises(ConfigError):
            FrequencyGrid(signal_axis=np.array([2.0, 1.0]),
                          idler_axis=np.array([1.0, 2.0]))
