import numpy as np
import pytest

from wavetouch.errors import ConfigError, InputError
from wavetouch.material_sim import (
    MaterialSpec,
    Trial,
    TrialConfig,
    builtin_materials,
    infill_materials,
    lookup_material,
    notch_center_hz,
    parse_materials,
    simulate_trial,
    stiffness_index,
    stiffness_materials,
    synth_dataset,
    transfer_magnitude,
)
from wavetouch.signals import ChirpConfig, Waveform, generate_chirp

SHORT = ChirpConfig(duration_s=0.5)


def test_registry():
    names = [m.name for m in stiffness_materials()]
    assert names == ["Silicone12", "Silicone18", "Silicone40", "FLEX", "TPU", "PLA"]
    assert [m.infill_fraction for m in infill_materials()] == [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]
    assert len(builtin_materials()) == 12
    assert lookup_material("TPU").youngs_modulus_mpa == 67.0
    with pytest.raises(InputError):
        lookup_material("Granite")


def test_stiffness_index_is_clamped_log_scale():
    assert stiffness_index(0.4) == pytest.approx(0.02268, abs=1e-4)
    assert stiffness_index(1e-6) == 0.0
    assert stiffness_index(1e9) == 1.0
    assert stiffness_index(63.7) < stiffness_index(67.0)


@pytest.mark.parametrize("name,e,phi", [
    ("", 1.0, 1.0),
    ("has space", 1.0, 1.0),
    ("ok", 0.0, 1.0),
    ("ok", -3.0, 1.0),
    ("ok", 1.0, 1.5),
    ("ok", float("nan"), 1.0),
])
def test_material_spec_validation(name, e, phi):
    with pytest.raises(InputError):
        MaterialSpec(name, e, phi)


def test_notch_moves_up_with_stiffness():
    centers = [notch_center_hz(m.blend) for m in stiffness_materials()]
    assert all(a < b for a, b in zip(centers, centers[1:]))
    assert all(100.0 < c < 400.0 for c in centers)


def test_transfer_is_positive_and_soft_objects_absorb():
    freqs = np.linspace(0.0, 2048.0, 4097)
    for m in builtin_materials():
        gain = transfer_magnitude(m, freqs)
        assert gain.shape == freqs.shape
        assert np.all(gain > 0)
    soft = lookup_material("Silicone12")
    band = (freqs >= 100) & (freqs <= 400)
    assert np.all(transfer_magnitude(soft, freqs)[band] < 1.0)
    assert isinstance(transfer_magnitude(soft, 250.0), float)


@pytest.mark.parametrize("kwargs", [
    dict(grip_force_n=0.0),
    dict(noise_snr_db=float("inf")),
    dict(seed=-1),
    dict(num_trials=0),
    dict(chirp="100:800"),
])
def test_trial_config_validation(kwargs):
    with pytest.raises(ConfigError):
        TrialConfig(**kwargs)


def test_noiseless_trial_emits_the_clean_chirp():
    cfg = TrialConfig(chirp=SHORT, noise_snr_db=None)
    t = simulate_trial(lookup_material("PLA"), cfg, 0)
    np.testing.assert_array_equal(t.emitted.samples, generate_chirp(SHORT).samples)
    assert t.label == "PLA"
    assert len(t.received) == len(t.emitted)


def test_unit_transfer_passes_chirp_through():
    cfg = TrialConfig(chirp=SHORT, noise_snr_db=None)
    t = simulate_trial(lookup_material("FLEX"), cfg, 0,
                       transfer=lambda m, f: np.ones_like(f))
    np.testing.assert_allclose(t.received.samples, t.emitted.samples, atol=1e-12)


def test_noise_level_matches_snr():
    cfg = TrialConfig(noise_snr_db=20.0)
    m = lookup_material("Silicone18")
    noisy = simulate_trial(m, cfg, 3)
    clean = simulate_trial(m, TrialConfig(noise_snr_db=None), 3)
    for noisy_w, clean_w in ((noisy.emitted, clean.emitted), (noisy.received, clean.received)):
        noise = noisy_w.samples - clean_w.samples
        snr = 20 * np.log10(clean_w.rms() / Waveform(noise, clean_w.sample_rate_hz).rms())
        assert snr == pytest.approx(20.0, abs=0.5)


def test_noise_streams_are_reproducible_and_independent():
    m = lookup_material("TPU")
    cfg = TrialConfig(chirp=SHORT, seed=11)
    a = simulate_trial(m, cfg, 4)
    b = simulate_trial(m, cfg, 4)
    assert a == b
    c = simulate_trial(m, cfg, 5)
    d = simulate_trial(m, TrialConfig(chirp=SHORT, seed=12), 4)
    assert not np.array_equal(a.emitted.samples, c.emitted.samples)
    assert not np.array_equal(a.emitted.samples, d.emitted.samples)
    emit_noise = a.emitted.samples - generate_chirp(SHORT).samples
    assert not np.allclose(emit_noise, a.received.samples - simulate_trial(
        m, TrialConfig(chirp=SHORT, noise_snr_db=None), 4).received.samples)


def test_negative_trial_index_rejected():
    with pytest.raises(InputError):
        simulate_trial(lookup_material("PLA"), TrialConfig(chirp=SHORT), -1)


def test_synth_dataset_order_and_equivalence():
    materials = [lookup_material("PLA"), lookup_material("Silicone40")]
    cfg = TrialConfig(chirp=SHORT, num_trials=3, seed=2)
    trials = synth_dataset(materials, cfg)
    assert [(t.label, t.trial_index) for t in trials] == [
        ("PLA", 0), ("PLA", 1), ("PLA", 2),
        ("Silicone40", 0), ("Silicone40", 1), ("Silicone40", 2),
    ]
    assert trials == [simulate_trial(m, cfg, i) for m in materials for i in range(3)]


def test_synth_dataset_respects_worker_limit(monkeypatch):
    monkeypatch.setenv("WAVETOUCH_WORKERS", "1")
    trials = synth_dataset([lookup_material("PLA")], TrialConfig(chirp=SHORT, num_trials=2))
    assert len(trials) == 2


def test_synth_dataset_needs_materials():
    with pytest.raises(InputError):
        synth_dataset([], TrialConfig())


def test_parse_materials():
    assert len(parse_materials("builtin")) == 12
    assert [m.name for m in parse_materials("stiffness")][-1] == "PLA"
    ms = parse_materials("PLA, Foam=0.05, Lattice=3200@0.3")
    assert [m.name for m in ms] == ["PLA", "Foam", "Lattice"]
    assert ms[1].youngs_modulus_mpa == 0.05
    assert ms[2].infill_fraction == pytest.approx(0.3)


@pytest.mark.parametrize("text", ["", "PLA,,TPU", "Granite", "X=abc", "X=-1", "PLA,PLA", "X=5@2"])
def test_parse_materials_rejects(text):
    with pytest.raises(ConfigError):
        parse_materials(text)


@pytest.mark.parametrize("kwargs", [dict(grip_force_n=-1.0), dict(grip_force_n=0.0), dict(seed=-1)])
def test_trial_validation(kwargs):
    t = simulate_trial(lookup_material("PLA"), TrialConfig(chirp=SHORT, noise_snr_db=None), 0)
    base = dict(material=t.material, emitted=t.emitted, received=t.received, trial_index=0)
    base.update(kwargs)
    with pytest.raises(InputError):
        Trial(**base)


def _mean_gain(m, band):
    return float(np.mean(transfer_magnitude(m, np.linspace(band[0], band[1], 3001))))


@pytest.mark.parametrize("modulus", [0.1, 0.4, 0.664, 1.696, 2.0])
def test_soft_objects_lose_a_third_of_the_low_band(modulus):
    assert 0.50 <= _mean_gain(MaterialSpec("soft", modulus), (100.0, 400.0)) <= 0.70


@pytest.mark.parametrize("modulus", [1000.0, 3200.0, 1e9])
def test_rigid_objects_amplify_the_high_band_moderately(modulus):
    assert 1.0 < _mean_gain(MaterialSpec("rigid", modulus), (400.0, 800.0)) <= 1.5


def test_transfer_examples():
    assert 0.50 <= transfer_magnitude(lookup_material("Silicone12"), 250.0) <= 0.70
    assert transfer_magnitude(lookup_material("PLA"), 500.0) > 1.0
    extremes = [MaterialSpec("a", 1e-3), MaterialSpec("b", 1e6), MaterialSpec("c", 5.0, 0.0)]
    for m in builtin_materials() + extremes:
        assert 0.1 <= transfer_magnitude(m, 0.0) <= 2.0
