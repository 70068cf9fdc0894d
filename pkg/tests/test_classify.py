import dataclasses
import warnings

import numpy as np
import pytest

from wavetouch.classify import (
    Model,
    evaluate_model,
    export_map,
    fit,
    predict,
    split_samples,
)
from wavetouch.errors import ConfigError, FitError, InputError
from wavetouch.features import FeatureVector


def fv(freq, slope, mag=-1.0):
    return FeatureVector(freq, mag, slope)


def clusters(seed=0, n=20):
    rng = np.random.default_rng(seed)
    centers = {"FLEX": (260.0, -0.002), "PLA": (360.0, 0.004), "Silicone12": (150.0, -0.006)}
    samples = []
    for label, (f, s) in centers.items():
        for _ in range(n):
            samples.append((label, fv(f + rng.normal(0, 3.0), s + rng.normal(0, 0.0003),
                                      rng.normal(-1, 0.1))))
    return samples


def test_fit_statistics_and_sorted_labels():
    samples = clusters()
    m = fit(samples)
    assert m.labels == ("FLEX", "PLA", "Silicone12")
    raw = np.array([s.select(("peak_freq", "slope")) for _, s in samples])
    np.testing.assert_allclose(m.mean, raw.mean(axis=0), rtol=1e-12)
    np.testing.assert_allclose(m.std, raw.std(axis=0), rtol=1e-12)
    z = (raw - m.mean) / m.std
    labels = np.array([label for label, _ in samples])
    for i, label in enumerate(m.labels):
        np.testing.assert_allclose(m.centroids[i], z[labels == label].mean(axis=0), atol=1e-12)


def test_model_is_immutable():
    m = fit(clusters())
    with pytest.raises(dataclasses.FrozenInstanceError):
        m.labels = ("a", "b")
    with pytest.raises(ValueError):
        m.centroids[0, 0] = 1.0


def test_fit_needs_two_classes():
    with pytest.raises(FitError):
        fit([("PLA", fv(300.0, 0.01)), ("PLA", fv(310.0, 0.02))])
    with pytest.raises(FitError):
        fit([])


def test_zero_variance_names_the_feature():
    samples = [("a", fv(200.0, 0.01)), ("b", fv(300.0, 0.01))]
    with pytest.raises(FitError, match="slope"):
        fit(samples)


def test_near_constant_feature_is_rejected():
    # two distinct slopes a few ulps apart
    slopes = [0.01, 0.01 + 1e-17, 0.01, 0.01]
    freqs = [200.0, 210.0, 300.0, 310.0]
    samples = [(label, fv(f, s)) for label, f, s in zip("aabb", freqs, slopes)]
    with pytest.raises(FitError, match="slope"):
        fit(samples)


def test_fit_of_identical_class_members_is_quiet():
    samples = [(label, fv(f, s)) for label, f, s in
               [("a", 200.0, -0.01)] * 3 + [("b", 300.0, 0.02)] * 3]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        m = fit(samples)
    assert not [w for w in caught if issubclass(w.category, (UserWarning, RuntimeWarning))]
    np.testing.assert_allclose(m.centroids, [[-1.0, -1.0], [1.0, 1.0]], atol=1e-12)


def test_unknown_feature_is_config_error():
    with pytest.raises(ConfigError):
        fit(clusters(), feature_selection=("peak_freq", "bandwidth"))


def test_alternative_feature_selection():
    m = fit(clusters(), feature_selection=("peak_freq", "peak_mag"))
    assert m.feature_names == ("peak_freq", "peak_mag")
    assert predict(m, fv(355.0, -0.006)).label == "PLA"


def test_predict_training_centroid_has_zero_distance():
    m = fit(clusters())
    raw = m.centroid("PLA") * m.std + m.mean
    p = predict(m, fv(raw[0], raw[1]))
    assert p.label == "PLA"
    assert p.distances["PLA"] == pytest.approx(0.0, abs=1e-9)
    assert set(p.distances) == set(m.labels)


def test_predict_ties_go_to_first_label():
    m = Model(labels=("a", "b"), centroids=np.array([[-1.0, 0.0], [1.0, 0.0]]),
              mean=np.zeros(2), std=np.ones(2))
    p = predict(m, fv(0.0, 0.0))
    assert p.distances["a"] == p.distances["b"]
    assert p.label == "a"


@pytest.mark.parametrize("kwargs", [
    dict(labels=("b", "a")),
    dict(labels=("a",), centroids=np.zeros((1, 2))),
    dict(labels=("a", "a")),
    dict(std=np.array([1.0, 0.0])),
    dict(centroids=np.zeros((3, 2))),
])
def test_model_validation(kwargs):
    base = dict(labels=("a", "b"), centroids=np.zeros((2, 2)), mean=np.zeros(2), std=np.ones(2))
    base.update(kwargs)
    with pytest.raises(FitError):
        Model(**base)


def test_training_order_does_not_matter():
    samples = clusters(seed=4)
    shuffled = [samples[i] for i in np.random.default_rng(9).permutation(len(samples))]
    a, b = fit(samples), fit(shuffled)
    assert a.labels == b.labels
    np.testing.assert_allclose(a.centroids, b.centroids, atol=1e-12)
    np.testing.assert_allclose(a.mean, b.mean, rtol=1e-12)
    np.testing.assert_allclose(a.std, b.std, rtol=1e-12)


def test_affine_rescaling_keeps_predictions():
    samples = clusters(seed=2)
    rescaled = [(label, fv(3.5 * s.low_peak_freq_hz - 40.0, 0.02 * s.high_trend_slope + 7.0))
                for label, s in samples]
    a, b = fit(samples), fit(rescaled)
    assert [predict(a, s).label for _, s in samples] == [predict(b, s).label for _, s in rescaled]


def test_export_map_orders_by_label_then_input():
    samples = [("PLA", fv(360.0, 0.004)), ("FLEX", fv(260.0, -0.002)),
               ("PLA", fv(362.0, 0.005)), ("FLEX", fv(262.0, -0.001))]
    m = fit(samples)
    cmap = export_map(m, samples)
    assert [(p.label, p.raw[0]) for p in cmap.points] == [
        ("FLEX", 260.0), ("FLEX", 262.0), ("PLA", 360.0), ("PLA", 362.0)]
    assert set(cmap.centroids) == {"FLEX", "PLA"}
    first = cmap.points[0]
    assert first.normalized == pytest.approx(tuple((np.array(first.raw) - m.mean) / m.std))


def test_export_map_rejects_unknown_labels():
    m = fit(clusters())
    with pytest.raises(InputError):
        export_map(m, [("Granite", fv(500.0, 0.1))])


def test_split_is_stratified_and_ordered():
    samples = clusters(n=50)
    train, test = split_samples(samples, 0.2, seed=3)
    assert len(train) == 120 and len(test) == 30
    for label in ("FLEX", "PLA", "Silicone12"):
        assert sum(1 for l, _ in test if l == label) == 10
    positions = [samples.index(s) for s in train]
    assert positions == sorted(positions)
    assert split_samples(samples, 0.2, seed=3) == (train, test)


def test_split_rejects_bad_fraction():
    with pytest.raises(InputError):
        split_samples(clusters(), 1.0)


def test_evaluate_model():
    train, test = split_samples(clusters(n=30), 0.2, seed=0)
    report = evaluate_model(fit(train), test)
    assert report["accuracy"] == 1.0
    assert report["labels"] == ["FLEX", "PLA", "Silicone12"]
    assert np.trace(np.array(report["confusion_matrix"])) == len(test)
