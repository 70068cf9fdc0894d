import numpy as np
import pytest

from wavetouch.errors import ConfigError, InputError
from wavetouch.signals import (
    ChirpConfig,
    SignedSpectrum,
    Spectrum,
    Waveform,
    dft_full,
    dft_magnitude,
    filter_bins,
    generate_chirp,
    sweep_presets,
    uniform_filter,
)


def test_default_chirp_length_and_formula():
    cfg = ChirpConfig()
    w = generate_chirp(cfg)
    assert len(w) == 8192
    assert w.sample_rate_hz == 4096.0
    t = np.arange(8192) / 4096.0
    expected = np.sin(2 * np.pi * (100.0 * t + (800.0 - 100.0) * t ** 2 / (2 * 2.0)))
    np.testing.assert_allclose(w.samples, expected, atol=1e-9)
    assert abs(w.samples[0]) < 1e-12


def test_chirp_amplitude_scales():
    w = generate_chirp(ChirpConfig(amplitude=0.25, duration_s=0.5))
    assert np.max(np.abs(w.samples)) <= 0.25 + 1e-12
    assert len(w) == 2048


@pytest.mark.parametrize("kwargs", [
    dict(f_end_hz=2048.0),
    dict(f_end_hz=3000.0),
    dict(f_start_hz=500.0, f_end_hz=400.0),
    dict(duration_s=0.0),
    dict(duration_s=-1.0),
    dict(amplitude=0.0),
    dict(sample_rate_hz=100.0, f_start_hz=10.0, f_end_hz=20.0, duration_s=0.1),
])
def test_chirp_config_rejects_invalid(kwargs):
    with pytest.raises(ConfigError):
        ChirpConfig(**kwargs)


def test_waveform_validation():
    with pytest.raises(InputError):
        Waveform(np.array([]), 100.0)
    with pytest.raises(InputError):
        Waveform(np.array([1.0, np.nan]), 100.0)
    with pytest.raises(InputError):
        Waveform(np.ones(4), 0.0)


def test_waveform_duration_and_rms():
    w = Waveform([3.0, -3.0, 3.0, -3.0, 3.0], 10.0)
    assert w.duration_s == pytest.approx(0.5)
    assert w.rms() == pytest.approx(3.0)
    np.testing.assert_allclose(w.times(), [0.0, 0.1, 0.2, 0.3, 0.4])


def test_waveform_is_read_only():
    w = Waveform(np.arange(4.0), 10.0)
    with pytest.raises(ValueError):
        w.samples[0] = 1.0


def test_dft_magnitude_grid():
    w = Waveform(np.random.default_rng(0).normal(size=1000), 500.0)
    s = dft_magnitude(w)
    assert len(s) == 501
    assert s.bin_width_hz == pytest.approx(0.5)
    assert np.all(s.magnitudes >= 0)


def test_dft_magnitude_pure_tone_lands_on_its_bin():
    n, rate = 1024, 1024.0
    t = np.arange(n) / rate
    s = dft_magnitude(Waveform(np.sin(2 * np.pi * 100.0 * t), rate))
    assert int(np.argmax(s.magnitudes)) == 100
    assert s.magnitudes[100] == pytest.approx(n / 2)


def test_dft_magnitude_is_homogeneous():
    rng = np.random.default_rng(5)
    x = rng.normal(size=513)
    base = dft_magnitude(Waveform(x, 100.0)).magnitudes
    for a in (-3.0, 0.5, 1e4):
        scaled = dft_magnitude(Waveform(a * x, 100.0)).magnitudes
        np.testing.assert_allclose(scaled, abs(a) * base, rtol=1e-9,
                                   atol=1e-9 * abs(a) * base.max())


def test_parseval_two_sided():
    x = np.random.default_rng(3).normal(size=777)
    X = dft_full(Waveform(x, 1.0))
    assert np.sum(np.abs(X) ** 2) / x.size == pytest.approx(np.sum(x ** 2), rel=1e-12)


@pytest.mark.parametrize("width_hz,bin_hz,expected", [
    (50.0, 0.5, 99),
    (50.0, 0.25, 199),
    (1.0, 0.5, 1),
    (0.4, 0.5, 1),
    (3.0, 1.0, 3),
    (4.0, 1.0, 3),
])
def test_filter_bins(width_hz, bin_hz, expected):
    assert filter_bins(width_hz, bin_hz) == expected


@pytest.mark.parametrize("width", [0.0, -5.0])
def test_filter_width_must_be_positive(width):
    with pytest.raises(ConfigError):
        uniform_filter(Spectrum(np.ones(10), 1.0), width)


def test_uniform_filter_keeps_constant_and_length():
    s = Spectrum(np.full(300, 2.5), 0.5)
    out = uniform_filter(s, 50.0)
    assert isinstance(out, Spectrum)
    assert len(out) == 300
    np.testing.assert_allclose(out.magnitudes, 2.5, rtol=1e-12)


def test_uniform_filter_matches_shrinking_window_average():
    rng = np.random.default_rng(7)
    values = rng.normal(size=60)
    out = uniform_filter(SignedSpectrum(values, 1.0), 7.0)
    assert isinstance(out, SignedSpectrum)
    expected = [values[max(0, i - 3):min(60, i + 4)].mean() for i in range(60)]
    np.testing.assert_allclose(out.values, expected, rtol=1e-12, atol=1e-12)


def test_uniform_filter_spreads_impulse_evenly():
    mags = np.zeros(401)
    mags[200] = 99.0
    out = uniform_filter(Spectrum(mags, 0.5), 50.0)
    np.testing.assert_allclose(out.magnitudes[151:250], 1.0, rtol=1e-12)
    assert out.magnitudes[150] == pytest.approx(0.0, abs=1e-12)
    assert out.magnitudes[250] == pytest.approx(0.0, abs=1e-12)


def test_width_one_bin_is_identity():
    values = np.random.default_rng(1).uniform(size=20)
    out = uniform_filter(Spectrum(values, 1.0), 1.0)
    np.testing.assert_array_equal(out.magnitudes, values)


def test_band_indices_closed_interval():
    s = Spectrum(np.ones(11), 10.0)
    np.testing.assert_array_equal(s.band_indices((20.0, 50.0)), [2, 3, 4, 5])


def test_sweep_presets():
    presets = sweep_presets()
    assert list(presets) == ["100-400", "100-600", "100-800"]
    assert presets["100-600"].f_end_hz == 600.0
    assert all(c.f_start_hz == 100.0 for c in presets.values())
