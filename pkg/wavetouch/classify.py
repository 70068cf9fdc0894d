# wavetouch/classify.py
"""
Nearest-centroid classification in a z-scored 2D feature space.
"""

import logging
import warnings
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np
from sklearn.metrics import accuracy_score, confusion_matrix
from sklearn.model_selection import train_test_split
from sklearn.neighbors import NearestCentroid
from sklearn.preprocessing import StandardScaler

from wavetouch.errors import FitError, InputError
from wavetouch.features import (
    DEFAULT_FEATURE_SELECTION,
    STIFFNESS_BANDS,
    BandConfig,
    FeatureVector,
    check_feature_selection,
)

logger = logging.getLogger(__name__)

Sample = Tuple[str, FeatureVector]


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Model:
    """Per-class centroids in normalized feature space plus the normalization."""

    labels: Tuple[str, ...]
    centroids: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    feature_names: Tuple[str, str] = DEFAULT_FEATURE_SELECTION
    band_config: BandConfig = STIFFNESS_BANDS

    def __post_init__(self):
        labels = tuple(str(label) for label in self.labels)
        if len(labels) < 2:
            raise FitError(f"a model needs at least 2 classes, got {len(labels)}")
        if len(set(labels)) != len(labels) or list(labels) != sorted(labels):
            raise FitError("model labels must be unique and sorted")
        names = check_feature_selection(self.feature_names)
        centroids = _frozen(self.centroids)
        mean = _frozen(self.mean).reshape(-1)
        std = _frozen(self.std).reshape(-1)
        if centroids.shape != (len(labels), 2) or mean.shape != (2,) or std.shape != (2,):
            raise FitError("model arrays do not match 2 features and the label count")
        if not (np.all(np.isfinite(centroids)) and np.all(np.isfinite(mean))
                and np.all(np.isfinite(std))):
            raise FitError("model values must be finite")
        if np.any(std <= 0):
            raise FitError("model standard deviations must be positive")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "centroids", centroids)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "std", std)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Model):
            return NotImplemented
        return (self.labels == other.labels
                and self.feature_names == other.feature_names
                and self.band_config == other.band_config
                and np.array_equal(self.centroids, other.centroids)
                and np.array_equal(self.mean, other.mean)
                and np.array_equal(self.std, other.std))

    def normalize(self, raw) -> np.ndarray:
        return (np.asarray(raw, dtype=np.float64) - self.mean) / self.std

    def centroid(self, label: str) -> np.ndarray:
        return self.centroids[self.labels.index(label)]


@dataclass(frozen=True)
class Prediction:
    label: str
    distances: Dict[str, float]


@dataclass(frozen=True)
class MapPoint:
    label: str
    raw: Tuple[float, float]
    normalized: Tuple[float, float]


@dataclass(frozen=True)
class ClassificationMap:
    """Everything needed to draw the 2D classification map."""

    points: Tuple[MapPoint, ...]
    centroids: Dict[str, Tuple[float, float]]
    feature_names: Tuple[str, str] = DEFAULT_FEATURE_SELECTION


# -----------------------------
# Training and prediction
# -----------------------------
def fit(samples: Sequence[Sample],
        feature_selection: Sequence[str] = DEFAULT_FEATURE_SELECTION,
        band_config: BandConfig = STIFFNESS_BANDS) -> Model:
    """Train a nearest-centroid model.

    Parameters
    ----------
    samples
        (label, FeatureVector) pairs.
    feature_selection
        Two of ``peak_freq``, ``peak_mag``, ``slope``.
    band_config
        Bands the features were extracted with; stored with the model.

    Returns
    -------
    Model
        Z-score statistics over all samples and the mean normalized feature
        pair of each label.
    """
    names = check_feature_selection(feature_selection)
    labels = sorted({label for label, _ in samples})
    if len(labels) < 2:
        raise FitError(f"need samples of at least 2 distinct labels, got {labels}")
    X = np.array([fv.select(names) for _, fv in samples], dtype=np.float64)
    y = np.array([label for label, _ in samples])
    scaler = StandardScaler().fit(X)
    # scale_ is 1.0 where the scaler judged the feature constant
    degenerate = scaler.scale_ != np.sqrt(scaler.var_)
    for j, name in enumerate(names):
        if degenerate[j]:
            raise FitError(f"feature {name!r} has zero variance across the training samples "
                           f"(std {np.sqrt(scaler.var_[j]):.3g})")

    Z = scaler.transform(X)
    with warnings.catch_warnings():
        # noiseless classes have zero within-class spread
        warnings.simplefilter("ignore", category=UserWarning)
        warnings.simplefilter("ignore", category=RuntimeWarning)
        nc = NearestCentroid().fit(Z, y)
    order = [list(nc.classes_).index(label) for label in labels]
    logger.info("fitted %d classes on %d samples using %s", len(labels), len(samples), names)
    return Model(
        labels=tuple(labels),
        centroids=nc.centroids_[order],
        mean=scaler.mean_,
        std=scaler.scale_,
        feature_names=names,
        band_config=band_config,
    )


def predict(m: Model, fv: FeatureVector) -> Prediction:
    """Label of the nearest centroid; ties go to the lexicographically first label."""
    raw = np.array(fv.select(m.feature_names), dtype=np.float64)
    if not np.all(np.isfinite(raw)):
        raise InputError(f"features must be finite, got {raw.tolist()}")
    z = m.normalize(raw)
    distances = np.linalg.norm(m.centroids - z, axis=1)
    best = int(np.argmin(distances))
    return Prediction(m.labels[best], {label: float(d) for label, d in zip(m.labels, distances)})


def export_map(m: Model, samples: Sequence[Sample]) -> ClassificationMap:
    """Raw and normalized coordinates of every sample plus the centroids.

    Points are ordered by label, then by input order.
    """
    known = set(m.labels)
    points = []
    for label, fv in samples:
        if label not in known:
            raise InputError(f"label {label!r} is not one of the model classes {list(m.labels)}")
        raw = fv.select(m.feature_names)
        z = m.normalize(raw)
        points.append(MapPoint(label, (float(raw[0]), float(raw[1])),
                               (float(z[0]), float(z[1]))))
    points.sort(key=lambda p: p.label)
    centroids = {label: (float(c[0]), float(c[1])) for label, c in zip(m.labels, m.centroids)}
    return ClassificationMap(tuple(points), centroids, m.feature_names)


# -----------------------------
# Evaluation helpers
# -----------------------------
def split_samples(samples: Sequence[Sample], test_fraction: float = 0.2,
                  seed: int = 0) -> Tuple[List[Sample], List[Sample]]:
    """Stratified train/test split; both halves keep the input order."""
    if not 0 < test_fraction < 1:
        raise InputError(f"test_fraction must be in (0, 1), got {test_fraction}")
    samples = list(samples)
    labels = [label for label, _ in samples]
    train_idx, test_idx = train_test_split(
        np.arange(len(samples)),
        test_size=test_fraction,
        stratify=labels,
        random_state=seed,
    )
    return ([samples[i] for i in sorted(train_idx)],
            [samples[i] for i in sorted(test_idx)])


def evaluate_model(m: Model, samples: Sequence[Sample]) -> dict:
    """Accuracy and confusion matrix of ``m`` on labelled samples.

    Returns
    -------
    dict
        - accuracy: fraction of samples predicted correctly
        - labels: class order of the confusion matrix
        - confusion_matrix: rows are true labels, columns predicted labels
        - predictions: predicted label per sample
    """
    if not samples:
        raise InputError("no samples to evaluate")
    y_true = [label for label, _ in samples]
    y_pred = [predict(m, fv).label for _, fv in samples]
    labels = sorted(set(m.labels) | set(y_true))
    return {
        "accuracy": float(accuracy_score(y_true, y_pred)),
        "labels": labels,
        "confusion_matrix": confusion_matrix(y_true, y_pred, labels=labels).tolist(),
        "predictions": y_pred,
    }
