# wavetouch/material_sim.py
"""
Synthetic stand-in for the gripper rig.

A chirp injected by the emitter finger travels through the squeezed object
and reaches the receiver finger shaped by a frequency dependent gain that
depends on the object's Young's modulus and infill. Both fingers record with
independent additive white noise.
"""

import asyncio
import hashlib
import logging
import math
import re
import threading
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from wavetouch import config
from wavetouch.concurrency import run_sync
from wavetouch.errors import ConfigError, InputError
from wavetouch.signals import ChirpConfig, Waveform, generate_chirp

logger = logging.getLogger(__name__)

DEFAULT_GRIP_FORCE_N = 1.0
DEFAULT_SNR_DB = 20.0
DEFAULT_NUM_TRIALS = 50

ROLE_EMITTER = 0
ROLE_RECEIVER = 1

# -----------------------------
# Gain model constants
# -----------------------------
# stiffness index s = clamp((log10(E) + LOG_OFFSET) / LOG_SPAN, 0, 1)
LOG_OFFSET = 0.5
LOG_SPAN = 4.5

# frequency independent absorption, strongest for soft/hollow objects
BASE_ABSORPTION = 0.3
BASE_ABSORPTION_EXP = 1.5

# contact resonance notch: depth, width and where it sits in the low band
NOTCH_DEPTH = 0.8
NOTCH_DEPTH_EXP = 2.5
NOTCH_WIDTH_HZ = 18.0
NOTCH_FLOOR_HZ = 150.0
NOTCH_SPAN_HZ = 170.0
# the notch jumps up across the thermoplastic elastomer range
TRANSITION_MODULUS_MPA = 65.0
TRANSITION_STEP_HZ = 60.0
TRANSITION_WIDTH = 0.008

# high band tilt: soft objects absorb more as frequency rises, rigid ones amplify
TILT_GAIN = 1.3
TILT_PIVOT = 0.45
TILT_CENTER_HZ = 600.0
TILT_SCALE_HZ = 100.0


# -----------------------------
# Domain types
# -----------------------------
@dataclass(frozen=True)
class MaterialSpec:
    """A test object: material label, Young's modulus (MPa) and infill fraction."""

    name: str
    youngs_modulus_mpa: float
    infill_fraction: float = 1.0

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name.strip():
            raise InputError("material name must be a non-empty string")
        if not re.fullmatch(r"[A-Za-z0-9_.+-]+", self.name):
            raise InputError(
                f"material name {self.name!r} may only contain letters, digits and _.+-"
            )
        e = float(self.youngs_modulus_mpa)
        if not math.isfinite(e) or e <= 0:
            raise InputError(f"{self.name}: youngs_modulus_mpa must be positive, got {e}")
        phi = float(self.infill_fraction)
        if not math.isfinite(phi) or not 0.0 <= phi <= 1.0:
            raise InputError(f"{self.name}: infill_fraction must be in [0, 1], got {phi}")
        object.__setattr__(self, "youngs_modulus_mpa", e)
        object.__setattr__(self, "infill_fraction", phi)

    @property
    def stiffness_index(self) -> float:
        return stiffness_index(self.youngs_modulus_mpa)

    @property
    def blend(self) -> float:
        """Stiffness index scaled by infill; the only material input of the gain model."""
        return self.stiffness_index * self.infill_fraction


@dataclass(frozen=True)
class TrialConfig:
    """How trials are generated. ``noise_snr_db=None`` means noiseless."""

    chirp: ChirpConfig = field(default_factory=ChirpConfig)
    grip_force_n: float = DEFAULT_GRIP_FORCE_N
    noise_snr_db: Optional[float] = DEFAULT_SNR_DB
    seed: int = 0
    num_trials: int = DEFAULT_NUM_TRIALS

    def __post_init__(self):
        if not isinstance(self.chirp, ChirpConfig):
            raise ConfigError("chirp must be a ChirpConfig")
        if not math.isfinite(self.grip_force_n) or self.grip_force_n <= 0:
            raise ConfigError(f"grip_force_n must be positive, got {self.grip_force_n}")
        if self.noise_snr_db is not None and not math.isfinite(self.noise_snr_db):
            raise ConfigError(f"noise_snr_db must be finite, got {self.noise_snr_db}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ConfigError(f"seed must be an unsigned integer, got {self.seed}")
        if int(self.num_trials) != self.num_trials or self.num_trials < 1:
            raise ConfigError(f"num_trials must be at least 1, got {self.num_trials}")

    @property
    def noiseless(self) -> bool:
        return self.noise_snr_db is None


@dataclass(frozen=True)
class Trial:
    """One squeeze: the emitter and receiver recordings for a material."""

    material: MaterialSpec
    emitted: Waveform
    received: Waveform
    trial_index: int
    grip_force_n: float = DEFAULT_GRIP_FORCE_N
    seed: int = 0

    def __post_init__(self):
        if len(self.emitted) != len(self.received):
            raise InputError(
                f"emitted ({len(self.emitted)}) and received ({len(self.received)}) lengths differ"
            )
        if self.emitted.sample_rate_hz != self.received.sample_rate_hz:
            raise InputError("emitted and received sample rates differ")
        if int(self.trial_index) != self.trial_index or self.trial_index < 0:
            raise InputError(f"trial_index must be a non-negative integer, got {self.trial_index}")
        if not math.isfinite(self.grip_force_n) or self.grip_force_n <= 0:
            raise InputError(f"grip_force_n must be positive, got {self.grip_force_n}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise InputError(f"seed must be a non-negative integer, got {self.seed}")

    @property
    def label(self) -> str:
        return self.material.name


# -----------------------------
# Material registry
# -----------------------------
_SOLID_CUBES: Tuple[Tuple[str, float], ...] = (
    ("Silicone12", 0.4),
    ("Silicone18", 0.664),
    ("Silicone40", 1.696),
    ("FLEX", 63.7),
    ("TPU", 67.0),
    ("PLA", 3200.0),
)
PLA_MODULUS_MPA = 3200.0
INFILL_LEVELS = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)


def infill_name(fraction: float) -> str:
    return f"PLA-infill-{int(round(fraction * 100)):03d}"


def stiffness_materials() -> List[MaterialSpec]:
    """The six solid test cubes, softest first."""
    return [MaterialSpec(name, e, 1.0) for name, e in _SOLID_CUBES]


def infill_materials() -> List[MaterialSpec]:
    """PLA cubes printed at 0, 20, 40, 60, 80 and 100 percent infill."""
    return [MaterialSpec(infill_name(phi), PLA_MODULUS_MPA, phi) for phi in INFILL_LEVELS]


def builtin_materials() -> List[MaterialSpec]:
    """Every built-in material: the six solid cubes followed by the PLA infill series."""
    return stiffness_materials() + infill_materials()


def lookup_material(name: str) -> MaterialSpec:
    for m in builtin_materials():
        if m.name == name:
            return m
    raise InputError(f"unknown material {name!r}")


def parse_materials(text: str) -> List[MaterialSpec]:
    """Parse the ``--materials`` argument.

    Parameters
    ----------
    text
        ``builtin``, ``stiffness``, ``infill``, or a comma separated list whose
        items are built-in names or custom ``name=E_MPa[@infill]`` entries.

    Returns
    -------
    list of MaterialSpec
        In the order given; names must be unique.
    """
    key = text.strip()
    presets = {
        "builtin": builtin_materials,
        "stiffness": stiffness_materials,
        "infill": infill_materials,
    }
    if key in presets:
        return presets[key]()
    materials = []
    for item in (part.strip() for part in key.split(",")):
        if not item:
            raise ConfigError(f"empty entry in material list {text!r}")
        if "=" not in item:
            try:
                materials.append(lookup_material(item))
            except InputError as e:
                raise ConfigError(str(e))
            continue
        name, _, value = item.partition("=")
        modulus, _, infill = value.partition("@")
        try:
            materials.append(
                MaterialSpec(name.strip(), float(modulus), float(infill) if infill else 1.0)
            )
        except ValueError as e:
            raise ConfigError(f"bad material entry {item!r}: {e}")
    names = [m.name for m in materials]
    if len(set(names)) != len(names):
        raise ConfigError(f"duplicate material names in {text!r}")
    return materials


# -----------------------------
# Gain model
# -----------------------------
def stiffness_index(youngs_modulus_mpa: float) -> float:
    """Map Young's modulus onto [0, 1] on a log scale (0.316 MPa .. 10 GPa)."""
    s = (math.log10(youngs_modulus_mpa) + LOG_OFFSET) / LOG_SPAN
    return min(max(s, 0.0), 1.0)


_TRANSITION_INDEX = stiffness_index(TRANSITION_MODULUS_MPA)


def _logistic(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def notch_center_hz(r: float) -> float:
    """Centre of the low band absorption notch for blend ``r``."""
    step = _logistic((r - _TRANSITION_INDEX) / TRANSITION_WIDTH)
    return NOTCH_FLOOR_HZ + NOTCH_SPAN_HZ * r + TRANSITION_STEP_HZ * float(step)


def transfer_magnitude(m: MaterialSpec, freq_hz):
    """Magnitude of the object's transfer function.

    Parameters
    ----------
    m
        Material; only its blend ``r = s * infill`` enters the model.
    freq_hz
        Frequency in Hz, scalar or array, non-negative.

    Returns
    -------
    float or numpy.ndarray
        Gain ``(1 - a(r)) * (1 - d(r) * notch(f)) * exp(k(r) * tilt(f))``: a flat
        absorption, a Gaussian notch that moves up the low band as the object
        stiffens, and a logistic tilt that bends the high band down for soft
        objects and up for rigid ones.
    """
    f = np.asarray(freq_hz, dtype=np.float64)
    r = m.blend
    absorption = BASE_ABSORPTION * (1.0 - r) ** BASE_ABSORPTION_EXP
    depth = NOTCH_DEPTH * (1.0 - r ** NOTCH_DEPTH_EXP)
    center = notch_center_hz(r)
    notch = np.exp(-0.5 * ((f - center) / NOTCH_WIDTH_HZ) ** 2)
    tilt = _logistic((f - TILT_CENTER_HZ) / TILT_SCALE_HZ)
    gain = (1.0 - absorption) * (1.0 - depth * notch) * np.exp(TILT_GAIN * (r - TILT_PIVOT) * tilt)
    if gain.ndim == 0:
        return float(gain)
    return gain


# -----------------------------
# Clean chirp cache
# -----------------------------
_cache: Dict[ChirpConfig, Tuple[np.ndarray, np.ndarray]] = {}
CACHE_SIZE = 16
_cache_lock = threading.Lock()


def _clean_chirp(chirp_config: ChirpConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Samples of the clean chirp and their one-sided transform (read-only)."""
    with _cache_lock:
        cached = _cache.get(chirp_config)
        if cached is not None:
            return cached
        samples = generate_chirp(chirp_config).samples
        spectrum = np.fft.rfft(samples)
        spectrum.setflags(write=False)
        if len(_cache) >= CACHE_SIZE:
            # simple FIFO
            _cache.pop(next(iter(_cache)), None)
        _cache[chirp_config] = (samples, spectrum)
        return samples, spectrum


# -----------------------------
# Trials
# -----------------------------
def _name_key(name: str) -> int:
    return int(hashlib.md5(name.encode("utf-8")).hexdigest()[:8], 16)


def _add_noise(clean: Waveform, snr_db: float, seed: int, name: str, trial_index: int,
               role: int) -> Waveform:
    ss = np.random.SeedSequence([int(seed), _name_key(name), int(trial_index), role])
    rng = np.random.default_rng(ss)
    sigma = clean.rms() * 10.0 ** (-snr_db / 20.0)
    return Waveform(clean.samples + rng.normal(0.0, sigma, size=len(clean)), clean.sample_rate_hz)


TransferFn = Callable[[MaterialSpec, np.ndarray], np.ndarray]


def simulate_trial(m: MaterialSpec, cfg: TrialConfig, trial_index: int,
                   transfer: TransferFn = transfer_magnitude) -> Trial:
    """Simulate one emitter/receiver recording pair.

    Parameters
    ----------
    m
        Material squeezed between the fingers.
    cfg
        Chirp, noise level, seed and grip force (recorded only).
    trial_index
        Index of the trial; selects the noise streams.
    transfer
        Gain function ``transfer(material, freqs_hz)``; defaults to
        :func:`transfer_magnitude`.

    Returns
    -------
    Trial
        Emitted chirp and the received signal (the chirp filtered by the gain
        in the frequency domain), each with its own noise.
    """
    if int(trial_index) != trial_index or trial_index < 0:
        raise InputError(f"trial_index must be a non-negative integer, got {trial_index}")
    chirp_cfg = cfg.chirp
    clean, spectrum = _clean_chirp(chirp_cfg)
    n = clean.size
    freqs = np.fft.rfftfreq(n, d=1.0 / chirp_cfg.sample_rate_hz)
    gains = np.asarray(transfer(m, freqs), dtype=np.float64)
    received_clean = np.fft.irfft(spectrum * gains, n=n)

    emitted = Waveform(clean, chirp_cfg.sample_rate_hz)
    received = Waveform(received_clean, chirp_cfg.sample_rate_hz)
    if not cfg.noiseless:
        emitted = _add_noise(emitted, cfg.noise_snr_db, cfg.seed, m.name, trial_index,
                             ROLE_EMITTER)
        received = _add_noise(received, cfg.noise_snr_db, cfg.seed, m.name, trial_index,
                              ROLE_RECEIVER)
    logger.debug("simulated %s trial %d (%.3f s)", m.name, trial_index, emitted.duration_s)
    return Trial(
        material=m,
        emitted=emitted,
        received=received,
        trial_index=int(trial_index),
        grip_force_n=cfg.grip_force_n,
        seed=int(cfg.seed),
    )


async def synth_dataset_async(materials: Sequence[MaterialSpec], cfg: TrialConfig) -> List[Trial]:
    """Generate ``cfg.num_trials`` trials per material in worker threads.

    Returns
    -------
    list of Trial
        Ordered by material (input order), then trial index.
    """
    if not materials:
        raise InputError("synth_dataset needs at least one material")
    jobs = [(m, i) for m in materials for i in range(cfg.num_trials)]
    logger.info("synthesizing %d trials for %d materials", len(jobs), len(materials))
    batch_size = config.max_workers()
    trials: List[Trial] = []
    for start in range(0, len(jobs), batch_size):
        batch = jobs[start:start + batch_size]
        trials.extend(await asyncio.gather(
            *[asyncio.to_thread(simulate_trial, m, cfg, i) for m, i in batch]
        ))
    return trials


def synth_dataset(materials: Sequence[MaterialSpec], cfg: TrialConfig) -> List[Trial]:
    """Synchronous wrapper around :func:`synth_dataset_async`."""
    return run_sync(synth_dataset_async(materials, cfg))
