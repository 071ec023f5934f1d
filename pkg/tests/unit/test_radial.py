import math

import numpy as np
import pytest

from app.core.dsp import bin_frequencies, fir_response
from app.core.errors import ConfigurationError, DomainError
from app.core.harmonics import equator_table
from app.core.radial import (
    EqualizationFilterBank,
    design_equalizers,
    mode_strength_sum,
    radial_term_bn,
    radial_term_kr,
    soft_limit,
    synthesize_bank,
)
from app.core.sphmath import sph_bessel_j, sph_bessel_j_deriv, sph_hankel2, sph_hankel2_deriv
from app.schemas.common import parse_model
from app.schemas.radial import RadialConfig
from tests.utils import DEFAULT_FS, DEFAULT_RADIUS, FIR_LENGTH

C = 343.0


def small_config(**overrides) -> RadialConfig:
    data = {"radius": DEFAULT_RADIUS, "sample_rate": DEFAULT_FS, "fir_length": 512, "max_order": 2}
    data.update(overrides)
    return RadialConfig(**data)


def omega_for_kr(kr, radius=DEFAULT_RADIUS):
    return np.asarray(kr) * C / radius


class TestRadialTerm:
    def test_n0_direct_composition(self):
        assert radial_term_kr(0, 1.0) == pytest.approx(-4 * np.pi * 1j / sph_hankel2_deriv(0, 1.0), rel=1e-14)

    def test_scattering_form(self):
        kr = np.linspace(0.1, 20, 200)
        for n in range(13):
            scattering = 4 * np.pi * (1j**n) * (
                sph_bessel_j(n, kr) - sph_bessel_j_deriv(n, kr) / sph_hankel2_deriv(n, kr) * sph_hankel2(n, kr)
            )
            np.testing.assert_allclose(radial_term_kr(n, kr), scattering, rtol=1e-10)

    def test_small_kr(self):
        values = [radial_term_kr(n, 1e-3) for n in range(6)]
        assert all(np.isfinite(v) and v != 0 for v in values)
        assert abs(values[0]) == pytest.approx(4 * np.pi, rel=1e-5)
        # b_n ~ (kR)^n near the origin
        ratios = [abs(v) / abs(values[0]) for v in values]
        assert all(a > b for a, b in zip(ratios, ratios[1:]))

    def test_bn_uses_config(self):
        cfg = small_config()
        omega = omega_for_kr(2.0)
        assert radial_term_bn(3, omega, cfg) == pytest.approx(radial_term_kr(3, 2.0), rel=1e-12)

    @pytest.mark.parametrize("omega", [0.0, -10.0])
    def test_domain(self, omega):
        with pytest.raises(DomainError):
            radial_term_bn(0, omega, small_config())


class TestModeStrength:
    def test_single_term(self):
        cfg = small_config(max_order=2, truncation_order=18)
        table = equator_table(18)
        omega = omega_for_kr(1.5)
        single = mode_strength_sum(2, omega, table, cfg, truncation=3)
        expected = radial_term_kr(2, 1.5) * table.value(2, 2) ** 2
        assert single == pytest.approx(expected, rel=1e-14)

    def test_convergence(self):
        cfg = small_config(max_order=0, truncation_order=40)
        table = equator_table(64)
        omega = omega_for_kr(2.0)
        s40 = mode_strength_sum(0, omega, table, cfg, truncation=40)
        s64 = mode_strength_sum(0, omega, table, cfg, truncation=64)
        assert abs(s40 - s64) < 1e-10 * abs(s64)

    def test_even_in_m(self):
        cfg = small_config(max_order=3)
        table = equator_table(cfg.truncation_order)
        omega = 2 * np.pi * np.array([100.0, 1000.0, 8000.0])
        np.testing.assert_array_equal(
            mode_strength_sum(-3, omega, table, cfg), mode_strength_sum(3, omega, table, cfg)
        )

    def test_table_too_small(self):
        cfg = small_config()
        with pytest.raises(ConfigurationError):
            mode_strength_sum(0, 1000.0, equator_table(4), cfg)


class TestRadialConfig:
    def test_default_truncation(self):
        assert small_config(max_order=4).truncation_order == 44
        assert small_config(max_order=30).truncation_order == 64

    @pytest.mark.parametrize(
        "overrides",
        [
            {"fir_length": 1000},
            {"fir_length": 4, "max_order": 2},
            {"truncation_order": 1},
            {"truncation_order": 10},
            {"radius": 0.0},
            {"max_order": 60},
        ],
    )
    def test_invalid(self, overrides):
        data = {"radius": DEFAULT_RADIUS, "sample_rate": DEFAULT_FS, "fir_length": 512, "max_order": 2}
        data.update(overrides)
        with pytest.raises(ConfigurationError):
            parse_model(RadialConfig, data)


class TestDesign:
    def test_realness_and_shape(self, bank4):
        assert bank4.firs.shape == (5, FIR_LENGTH)
        assert bank4.firs.dtype == np.float64
        assert np.all(np.isfinite(bank4.firs))

    def test_round_trip(self, bank4):
        for m in range(5):
            measured = fir_response(bank4.fir(m), bank4.modeling_delay)
            stored = bank4.response(m)
            np.testing.assert_allclose(measured[1:], stored[1:], rtol=1e-9, atol=1e-9 * np.max(np.abs(stored)))

    def test_dc_zero(self, bank4):
        assert np.all(bank4.responses[:, 0] == 0)

    def test_ceiling(self, bank4):
        limit = 10 ** (bank4.config.max_gain_db / 20)
        for m in range(5):
            g_ref = np.min(np.abs(bank4.raw_responses[m, 1:]))
            assert np.all(np.abs(bank4.responses[m]) <= limit * g_ref)

    def test_passband_untouched(self, bank4):
        freqs = bank4.frequencies
        for m in range(1, 5):
            # kR close to the mode number
            k = int(np.argmin(np.abs(2 * np.pi * freqs * DEFAULT_RADIUS / C - m)))
            ratio = abs(bank4.responses[m, k]) / abs(bank4.raw_responses[m, k])
            assert 20 * math.log10(ratio) > -0.1
            assert not bank4.regularization_active[m, k]

    def test_peak_inside_delay_half(self, bank4):
        peak = int(np.argmax(np.abs(bank4.fir(0))))
        assert abs(peak - bank4.modeling_delay) < FIR_LENGTH // 4

    def test_valid_bands(self, bank4):
        for m in range(5):
            band = bank4.valid_band(m)
            assert band is not None
            assert band[0] > 0
        # higher modes need more gain at low frequencies
        assert bank4.valid_band(4)[0] > bank4.valid_band(1)[0]

    def test_deterministic(self, bank4):
        again = design_equalizers(bank4.config)
        np.testing.assert_array_equal(again.firs, bank4.firs)
        assert again.firs.tobytes() == bank4.firs.tobytes()

    def test_summary(self, bank4):
        summary = bank4.summary()
        assert summary.modeling_delay == FIR_LENGTH // 2
        assert [s.mode for s in summary.modes] == [0, 1, 2, 3, 4]


def test_soft_limit_preserves_phase():
    raw = np.array([1.0 + 1.0j, 100.0 - 100.0j, -5.0j])
    limited, ceiling = soft_limit(raw, 20.0)
    assert ceiling == pytest.approx(10 * math.sqrt(2))
    np.testing.assert_allclose(np.angle(limited), np.angle(raw), atol=1e-14)
    assert np.all(np.abs(limited) <= ceiling)


class TestSynthesizeBank:
    def test_identity_bank(self):
        cfg = small_config()
        bank = synthesize_bank(cfg, np.ones((3, cfg.bin_count)))
        assert isinstance(bank, EqualizationFilterBank)
        expected = np.zeros(cfg.fir_length)
        expected[cfg.modeling_delay] = 1.0
        np.testing.assert_allclose(bank.fir(1), expected, atol=1e-15)
        assert bank.valid_band(0) == (bin_frequencies(512, DEFAULT_FS)[1], DEFAULT_FS / 2)

    def test_shape_checked(self):
        cfg = small_config()
        with pytest.raises(ConfigurationError):
            synthesize_bank(cfg, np.ones((2, cfg.bin_count)))
