# wavetouch/features.py
"""
Differential spectrum features.

The received magnitude spectrum minus the emitted one, both smoothed, is
reduced to two numbers: where the strongest low band excursion sits, and how
the high band trends with frequency.
"""

import asyncio
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from wavetouch import config
from wavetouch.concurrency import run_sync
from wavetouch.errors import ConfigError, InputError
from wavetouch.material_sim import Trial
from wavetouch.signals import SignedSpectrum, Spectrum, dft_magnitude, uniform_filter

DEFAULT_LOW_BAND_HZ = (100.0, 400.0)
DEFAULT_HIGH_BAND_HZ = (400.0, 800.0)
DEFAULT_FILTER_WIDTH_HZ = 50.0

Band = Tuple[float, float]

# feature key -> FeatureVector attribute
FEATURES = {
    "peak_freq": "low_peak_freq_hz",
    "peak_mag": "low_peak_mag",
    "slope": "high_trend_slope",
}
DEFAULT_FEATURE_SELECTION = ("peak_freq", "slope")


@dataclass(frozen=True)
class BandConfig:
    """Analysis bands and smoothing width."""

    low_band_hz: Band = DEFAULT_LOW_BAND_HZ
    high_band_hz: Band = DEFAULT_HIGH_BAND_HZ
    filter_width_hz: float = DEFAULT_FILTER_WIDTH_HZ

    def __post_init__(self):
        try:
            low = tuple(float(v) for v in self.low_band_hz)
            high = tuple(float(v) for v in self.high_band_hz)
        except (TypeError, ValueError):
            raise ConfigError("bands must be pairs of numbers")
        if len(low) != 2 or len(high) != 2:
            raise ConfigError("bands must be (lo, hi) pairs")
        if not all(math.isfinite(v) for v in low + high):
            raise ConfigError("band edges must be finite")
        if not (0 <= low[0] < low[1] <= high[0] < high[1]):
            raise ConfigError(
                f"bands must satisfy 0 <= low.lo < low.hi <= high.lo < high.hi, "
                f"got low={low} high={high}"
            )
        width = float(self.filter_width_hz)
        if not math.isfinite(width) or width <= 0:
            raise ConfigError(f"filter_width_hz must be positive, got {self.filter_width_hz}")
        object.__setattr__(self, "low_band_hz", low)
        object.__setattr__(self, "high_band_hz", high)
        object.__setattr__(self, "filter_width_hz", width)


STIFFNESS_BANDS = BandConfig()
INFILL_BANDS = BandConfig(high_band_hz=(450.0, 600.0))
PRELIMINARY_BANDS = BandConfig(high_band_hz=(400.0, 1000.0))


@dataclass(frozen=True)
class FeatureVector:
    """Low band peak (frequency and signed value) and high band trend slope."""

    low_peak_freq_hz: float
    low_peak_mag: float
    high_trend_slope: float

    def __post_init__(self):
        for name in ("low_peak_freq_hz", "low_peak_mag", "high_trend_slope"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InputError(f"feature {name} is not finite: {value}")
            object.__setattr__(self, name, value)

    def select(self, names: Sequence[str]) -> Tuple[float, ...]:
        return tuple(getattr(self, FEATURES[n]) for n in names)


def check_feature_selection(names: Sequence[str]) -> Tuple[str, str]:
    names = tuple(names)
    if len(names) != 2:
        raise ConfigError(f"exactly two features are needed, got {len(names)}")
    unknown = [n for n in names if n not in FEATURES]
    if unknown:
        raise ConfigError(f"unknown feature(s) {unknown}; choose from {sorted(FEATURES)}")
    if names[0] == names[1]:
        raise ConfigError(f"the two features must differ, got {names}")
    return names


# -----------------------------
# Operations
# -----------------------------
def differential_spectrum(emitted: Spectrum, received: Spectrum,
                          filter_width_hz: float = DEFAULT_FILTER_WIDTH_HZ) -> SignedSpectrum:
    """Smoothed received spectrum minus smoothed emitted spectrum.

    Parameters
    ----------
    emitted, received
        Raw magnitude spectra on the same grid.
    filter_width_hz
        Boxcar width applied to both before subtracting.

    Returns
    -------
    SignedSpectrum
        Negative where the object absorbs, positive where it amplifies.
    """
    if not emitted.same_grid(received):
        raise InputError(
            f"spectra are on different grids: {len(emitted)} bins of {emitted.bin_width_hz} Hz "
            f"vs {len(received)} bins of {received.bin_width_hz} Hz"
        )
    e = uniform_filter(emitted, filter_width_hz).magnitudes
    r = uniform_filter(received, filter_width_hz).magnitudes
    return SignedSpectrum(r - e, emitted.bin_width_hz)


def _band_bins(diff: SignedSpectrum, band: Band, minimum: int) -> np.ndarray:
    lo, hi = band
    top = (len(diff) - 1) * diff.bin_width_hz
    if lo < 0 or hi > top or lo > hi:
        raise InputError(f"band [{lo}, {hi}] Hz is outside the spectrum grid [0, {top}] Hz")
    idx = diff.band_indices(band)
    if idx.size < minimum:
        raise InputError(
            f"band [{lo}, {hi}] Hz holds {idx.size} bins, at least {minimum} are needed"
        )
    return idx


def low_band_peak(diff: SignedSpectrum, band: Band = DEFAULT_LOW_BAND_HZ) -> Tuple[float, float]:
    """Largest absolute excursion in ``band``.

    Returns
    -------
    tuple
        (bin centre frequency in Hz, signed value). Ties go to the lowest frequency.
    """
    idx = _band_bins(diff, band, 3)
    values = diff.values[idx]
    k = idx[int(np.argmax(np.abs(values)))]
    return float(k * diff.bin_width_hz), float(diff.values[k])


def high_band_trend(diff: SignedSpectrum, band: Band = DEFAULT_HIGH_BAND_HZ) -> float:
    """Ordinary least squares slope of the differential over ``band`` (units per Hz)."""
    idx = _band_bins(diff, band, 2)
    freqs = idx * diff.bin_width_hz
    # centred design matrix keeps the fit well conditioned
    design = np.column_stack([freqs - freqs.mean(), np.ones_like(freqs)])
    coef, *_ = np.linalg.lstsq(design, diff.values[idx], rcond=None)
    return float(coef[0])


def extract_features(t: Trial, bands: BandConfig = STIFFNESS_BANDS) -> FeatureVector:
    """Feature vector of one trial.

    Parameters
    ----------
    t
        Trial with emitted and received recordings.
    bands
        Low and high analysis bands and the smoothing width.

    Returns
    -------
    FeatureVector
        Low band peak frequency and value, high band trend slope.
    """
    diff = differential_spectrum(dft_magnitude(t.emitted), dft_magnitude(t.received),
                                 bands.filter_width_hz)
    freq, mag = low_band_peak(diff, bands.low_band_hz)
    slope = high_band_trend(diff, bands.high_band_hz)
    return FeatureVector(freq, mag, slope)


async def extract_features_batch_async(trials: Sequence[Trial],
                                       bands: BandConfig = STIFFNESS_BANDS) -> List[FeatureVector]:
    """Extract features for many trials in worker threads, keeping input order."""
    batch_size = config.max_workers()
    features: List[FeatureVector] = []
    for start in range(0, len(trials), batch_size):
        batch = trials[start:start + batch_size]
        features.extend(await asyncio.gather(
            *[asyncio.to_thread(extract_features, t, bands) for t in batch]
        ))
    return features


def extract_features_batch(trials: Sequence[Trial],
                           bands: BandConfig = STIFFNESS_BANDS) -> List[FeatureVector]:
    return run_sync(extract_features_batch_async(list(trials), bands))


def band_energy_ratio(t: Trial, band: Band) -> float:
    """Summed received magnitude over summed emitted magnitude in ``band``.

    Below 1 the object absorbs in that band, above 1 it amplifies.
    """
    emitted = dft_magnitude(t.emitted)
    received = dft_magnitude(t.received)
    idx = emitted.band_indices(band)
    if idx.size == 0:
        raise InputError(f"band {band} holds no bins")
    total = float(np.sum(emitted.magnitudes[idx]))
    if total == 0:
        raise InputError(f"emitted signal has no energy in band {band}")
    return float(np.sum(received.magnitudes[idx])) / total
