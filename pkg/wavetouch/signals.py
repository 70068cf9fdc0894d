# wavetouch/signals.py
"""
Signal primitives.

Chirp synthesis, one-sided DFT magnitudes and boxcar smoothing of spectra.
"""

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy.ndimage import uniform_filter1d
from scipy.signal import chirp

from wavetouch.errors import ConfigError, InputError

DEFAULT_SAMPLE_RATE_HZ = 4096.0
DEFAULT_F_START_HZ = 100.0
DEFAULT_F_END_HZ = 800.0
DEFAULT_DURATION_S = 2.0
DEFAULT_AMPLITUDE = 1.0
MIN_CHIRP_SAMPLES = 16


def _frozen_array(values, dtype=np.float64) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


# -----------------------------
# Value types
# -----------------------------
@dataclass(frozen=True, eq=False)
class Waveform:
    """Uniformly sampled real time series."""

    samples: np.ndarray
    sample_rate_hz: float

    def __post_init__(self):
        samples = _frozen_array(self.samples)
        if samples.size == 0:
            raise InputError("waveform has no samples")
        if not np.all(np.isfinite(samples)):
            raise InputError("waveform samples must be finite")
        rate = float(self.sample_rate_hz)
        if not np.isfinite(rate) or rate <= 0:
            raise InputError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate_hz", rate)

    def __len__(self) -> int:
        return self.samples.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, Waveform):
            return NotImplemented
        return (self.sample_rate_hz == other.sample_rate_hz
                and np.array_equal(self.samples, other.samples))

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz

    def times(self) -> np.ndarray:
        return np.arange(self.samples.size) / self.sample_rate_hz

    def rms(self) -> float:
        return float(np.sqrt(np.mean(self.samples ** 2)))


@dataclass(frozen=True)
class ChirpConfig:
    """Linear frequency sweep parameters."""

    f_start_hz: float = DEFAULT_F_START_HZ
    f_end_hz: float = DEFAULT_F_END_HZ
    duration_s: float = DEFAULT_DURATION_S
    amplitude: float = DEFAULT_AMPLITUDE
    sample_rate_hz: float = DEFAULT_SAMPLE_RATE_HZ

    def __post_init__(self):
        for name in ("f_start_hz", "f_end_hz", "duration_s", "amplitude", "sample_rate_hz"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ConfigError(f"{name} must be positive, got {value}")
        if self.f_end_hz < self.f_start_hz:
            raise ConfigError(
                f"f_end_hz ({self.f_end_hz}) must not be below f_start_hz ({self.f_start_hz})"
            )
        nyquist = self.sample_rate_hz / 2
        if self.f_end_hz >= nyquist:
            raise ConfigError(
                f"f_end_hz ({self.f_end_hz}) must be below Nyquist ({nyquist}) "
                f"for sample_rate_hz {self.sample_rate_hz}"
            )
        if self.duration_s * self.sample_rate_hz < MIN_CHIRP_SAMPLES:
            raise ConfigError(
                f"chirp needs at least {MIN_CHIRP_SAMPLES} samples, "
                f"got duration_s * sample_rate_hz = {self.duration_s * self.sample_rate_hz}"
            )

    @property
    def num_samples(self) -> int:
        return int(round(self.duration_s * self.sample_rate_hz))


class _SpectrumBase:
    bin_width_hz: float

    def __len__(self) -> int:
        return self._values().size

    def frequencies(self) -> np.ndarray:
        return np.arange(self._values().size) * self.bin_width_hz

    def band_indices(self, band: Tuple[float, float]) -> np.ndarray:
        """Indices of bins whose centre lies in the closed interval ``band``."""
        lo, hi = band
        freqs = self.frequencies()
        return np.flatnonzero((freqs >= lo) & (freqs <= hi))

    def same_grid(self, other) -> bool:
        return len(self) == len(other) and self.bin_width_hz == other.bin_width_hz


def _check_bin_width(value) -> float:
    width = float(value)
    if not np.isfinite(width) or width <= 0:
        raise InputError(f"bin_width_hz must be positive, got {value}")
    return width


@dataclass(frozen=True, eq=False)
class Spectrum(_SpectrumBase):
    """Non-negative magnitudes on a uniform frequency grid starting at 0 Hz."""

    magnitudes: np.ndarray
    bin_width_hz: float

    def __post_init__(self):
        mags = _frozen_array(self.magnitudes)
        if mags.size == 0:
            raise InputError("spectrum has no bins")
        if not np.all(np.isfinite(mags)) or np.any(mags < 0):
            raise InputError("spectrum magnitudes must be finite and non-negative")
        object.__setattr__(self, "magnitudes", mags)
        object.__setattr__(self, "bin_width_hz", _check_bin_width(self.bin_width_hz))

    def _values(self) -> np.ndarray:
        return self.magnitudes


@dataclass(frozen=True, eq=False)
class SignedSpectrum(_SpectrumBase):
    """Spectrum whose values may be negative (e.g. a differential spectrum)."""

    values: np.ndarray
    bin_width_hz: float

    def __post_init__(self):
        values = _frozen_array(self.values)
        if values.size == 0:
            raise InputError("spectrum has no bins")
        if not np.all(np.isfinite(values)):
            raise InputError("spectrum values must be finite")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "bin_width_hz", _check_bin_width(self.bin_width_hz))

    def _values(self) -> np.ndarray:
        return self.values


# -----------------------------
# Operations
# -----------------------------
def generate_chirp(config: ChirpConfig) -> Waveform:
    """Synthesize a linear chirp.

    Parameters
    ----------
    config
        Sweep bounds, duration, amplitude and sample rate.

    Returns
    -------
    Waveform
        ``round(duration_s * sample_rate_hz)`` samples of
        ``amplitude * sin(2π(f0·t + (f1 − f0)·t² / (2T)))``.
    """
    if not isinstance(config, ChirpConfig):
        raise ConfigError(f"expected ChirpConfig, got {type(config).__name__}")
    t = np.arange(config.num_samples) / config.sample_rate_hz
    # phi=-90 turns scipy's cosine into a sine with zero initial phase
    samples = config.amplitude * chirp(
        t,
        f0=config.f_start_hz,
        t1=config.duration_s,
        f1=config.f_end_hz,
        method="linear",
        phi=-90,
    )
    return Waveform(samples, config.sample_rate_hz)


def dft_full(w: Waveform) -> np.ndarray:
    """Two-sided complex DFT of the waveform (no padding, no window)."""
    return np.fft.fft(w.samples)


def dft_magnitude(w: Waveform) -> Spectrum:
    """One-sided DFT magnitude spectrum.

    Parameters
    ----------
    w
        Waveform to transform. No window is applied and no zero padding is done.

    Returns
    -------
    Spectrum
        ``|X[k]|`` for k in [0, N/2] with ``bin_width_hz = sample_rate_hz / N``.
    """
    if not isinstance(w, Waveform) or len(w) == 0:
        raise InputError("dft_magnitude needs a non-empty Waveform")
    mags = np.abs(np.fft.rfft(w.samples))
    return Spectrum(mags, w.sample_rate_hz / len(w))


def filter_bins(width_hz: float, bin_width_hz: float) -> int:
    """Largest odd window length not wider than ``width_hz`` (at least 1)."""
    if not np.isfinite(width_hz) or width_hz <= 0:
        raise ConfigError(f"filter width must be positive, got {width_hz}")
    n = int(np.floor(width_hz / bin_width_hz))
    if n % 2 == 0:
        n -= 1
    return max(n, 1)


def _boxcar(values: np.ndarray, w_bins: int) -> np.ndarray:
    if w_bins == 1:
        return values.copy()
    half = w_bins // 2
    # zero padding plus an exact per-bin count gives shrinking edge windows
    sums = uniform_filter1d(values, size=w_bins, mode="constant", cval=0.0) * w_bins
    idx = np.arange(values.size)
    counts = np.minimum(idx + half, values.size - 1) - np.maximum(idx - half, 0) + 1
    return sums / counts


SpectrumLike = Union[Spectrum, SignedSpectrum]


def uniform_filter(s: SpectrumLike, width_hz: float) -> SpectrumLike:
    """Centered moving average over ``width_hz`` of spectrum.

    Parameters
    ----------
    s
        Spectrum (or signed spectrum) to smooth.
    width_hz
        Window width in Hz; the window holds the largest odd number of bins
        that fits, and shrinks at the edges to the bins that exist.

    Returns
    -------
    Spectrum or SignedSpectrum
        Same type, length and grid as ``s``.
    """
    w_bins = filter_bins(width_hz, s.bin_width_hz)
    if isinstance(s, SignedSpectrum):
        return SignedSpectrum(_boxcar(s.values, w_bins), s.bin_width_hz)
    smoothed = np.maximum(_boxcar(s.magnitudes, w_bins), 0.0)
    return Spectrum(smoothed, s.bin_width_hz)


def sweep_presets(sample_rate_hz: float = DEFAULT_SAMPLE_RATE_HZ) -> dict:
    """The three soft-vs-rigid sweeps: 100-400, 100-600 and 100-800 Hz."""
    return {
        f"{lo:g}-{hi:g}": ChirpConfig(f_start_hz=lo, f_end_hz=hi, sample_rate_hz=sample_rate_hz)
        for lo, hi in ((100.0, 400.0), (100.0, 600.0), (100.0, 800.0))
    }
