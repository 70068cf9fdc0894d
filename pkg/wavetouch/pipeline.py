# wavetouch/pipeline.py
"""
File formats and command implementations.

Trial files are comma separated text with a ``#key=value`` header block;
model files are plain ``key=value`` lines. Every output is written to a
temporary file in the target directory and renamed into place.
"""

import io
import logging
import math
import os
import sys
import tempfile
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, TextIO, Union

import numpy as np
import pandas as pd

from wavetouch.classify import ClassificationMap, Model, Prediction, export_map, fit, predict
from wavetouch.errors import ConfigError, InputError, TrialFormatError, WaveTouchError
from wavetouch.features import (
    DEFAULT_FEATURE_SELECTION,
    STIFFNESS_BANDS,
    BandConfig,
    check_feature_selection,
    differential_spectrum,
    extract_features_batch,
    high_band_trend,
    low_band_peak,
)
from wavetouch.material_sim import MaterialSpec, Trial, TrialConfig, synth_dataset
from wavetouch.plotting import differential_svg, map_svg
from wavetouch.signals import Waveform, dft_magnitude, uniform_filter

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
TRIAL_COLUMNS = ("time_s", "accel_emit", "accel_recv")
TRIAL_HEADER_KEYS = (
    "format_version",
    "sample_rate_hz",
    "material",
    "youngs_modulus_mpa",
    "infill_fraction",
    "trial_index",
    "grip_force_n",
    "seed",
)
TIME_TOLERANCE = 1e-9
FLOAT_FORMAT = "%.17g"

PathLike = Union[str, Path]


def _g(value: float) -> str:
    return format(float(value), ".17g")


# -----------------------------
# Atomic writes
# -----------------------------
def atomic_write(path: PathLike, data: Union[str, bytes]) -> Path:
    """Write ``data`` to a temp file next to ``path`` and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = data.encode("utf-8") if isinstance(data, str) else data
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(payload)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise
    return path


def _table_csv(df: pd.DataFrame) -> str:
    return df.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def _read_lines(path: PathLike) -> List[str]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return f.read().splitlines()
    except FileNotFoundError:
        raise InputError(f"{path}: no such file")
    except IsADirectoryError:
        raise InputError(f"{path}: is a directory")
    except UnicodeDecodeError:
        raise TrialFormatError("file is not UTF-8 text", path)


def expand_inputs(paths: Iterable[PathLike]) -> List[Path]:
    """Input paths in the given order; a directory stands for its ``*.csv`` files, sorted."""
    expanded: List[Path] = []
    for p in map(Path, paths):
        if p.is_dir():
            expanded.extend(sorted(p.glob("*.csv")))
        else:
            expanded.append(p)
    if not expanded:
        raise InputError("no input trial files")
    return expanded


# -----------------------------
# Trial files
# -----------------------------
def write_trial(t: Trial, path: PathLike) -> Path:
    """Serialize a trial; floats keep 17 significant digits so reading it back is lossless."""
    header = {
        "format_version": str(FORMAT_VERSION),
        "sample_rate_hz": _g(t.emitted.sample_rate_hz),
        "material": t.material.name,
        "youngs_modulus_mpa": _g(t.material.youngs_modulus_mpa),
        "infill_fraction": _g(t.material.infill_fraction),
        "trial_index": str(int(t.trial_index)),
        "grip_force_n": _g(t.grip_force_n),
        "seed": str(int(t.seed)),
    }
    buf = io.StringIO()
    for key in TRIAL_HEADER_KEYS:
        buf.write(f"#{key}={header[key]}\n")
    rows = pd.DataFrame({
        "time_s": t.emitted.times(),
        "accel_emit": t.emitted.samples,
        "accel_recv": t.received.samples,
    })
    buf.write(_table_csv(rows))
    return atomic_write(path, buf.getvalue())


def _parse_float(text: str, what: str, path, line: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise TrialFormatError(f"{what} is not a number: {text!r}", path, line)
    if not math.isfinite(value):
        raise TrialFormatError(f"{what} is not finite: {text!r}", path, line)
    return value


def _parse_int(text: str, what: str, path, line: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise TrialFormatError(f"{what} is not an integer: {text!r}", path, line)


def ingest_trial(path: PathLike) -> Trial:
    """Parse a trial file.

    Raises
    ------
    TrialFormatError
        Malformed header or row (with its line number), or timestamps that do
        not advance by ``1 / sample_rate_hz``.
    """
    lines = _read_lines(path)
    header: Dict[str, str] = {}
    header_lines: Dict[str, int] = {}
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        lineno = i + 1
        key, sep, value = lines[i][1:].partition("=")
        key = key.strip()
        if not sep:
            raise TrialFormatError(f"header line is not key=value: {lines[i]!r}", path, lineno)
        if key not in TRIAL_HEADER_KEYS:
            raise TrialFormatError(f"unknown header key {key!r}", path, lineno)
        if key in header:
            raise TrialFormatError(f"duplicate header key {key!r}", path, lineno)
        header[key] = value.strip()
        header_lines[key] = lineno
        i += 1
    missing = [k for k in TRIAL_HEADER_KEYS if k not in header]
    if missing:
        raise TrialFormatError(f"missing header keys {missing}", path, i + 1)

    version = _parse_int(header["format_version"], "format_version", path,
                         header_lines["format_version"])
    if version != FORMAT_VERSION:
        raise TrialFormatError(f"unsupported format_version {version}", path,
                               header_lines["format_version"])
    rate = _parse_float(header["sample_rate_hz"], "sample_rate_hz", path,
                        header_lines["sample_rate_hz"])
    if rate <= 0:
        raise TrialFormatError("sample_rate_hz must be positive", path,
                               header_lines["sample_rate_hz"])
    values = {
        key: _parse_float(header[key], key, path, header_lines[key])
        for key in ("youngs_modulus_mpa", "infill_fraction", "grip_force_n")
    }
    trial_index = _parse_int(header["trial_index"], "trial_index", path,
                             header_lines["trial_index"])
    seed = _parse_int(header["seed"], "seed", path, header_lines["seed"])
    if seed < 0:
        raise TrialFormatError(f"seed must be non-negative, got {seed}", path,
                               header_lines["seed"])
    if not values["grip_force_n"] > 0:
        raise TrialFormatError(f"grip_force_n must be positive, got {values['grip_force_n']}",
                               path, header_lines["grip_force_n"])
    try:
        material = MaterialSpec(header["material"], values["youngs_modulus_mpa"],
                                values["infill_fraction"])
    except InputError as e:
        raise TrialFormatError(str(e), path, header_lines["material"])

    if i >= len(lines) or lines[i].strip() != ",".join(TRIAL_COLUMNS):
        raise TrialFormatError(f"expected column header {','.join(TRIAL_COLUMNS)!r}", path, i + 1)
    i += 1

    rows = []
    for lineno, line in enumerate(lines[i:], start=i + 1):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != len(TRIAL_COLUMNS):
            raise TrialFormatError(
                f"expected {len(TRIAL_COLUMNS)} fields, got {len(fields)}", path, lineno
            )
        rows.append((lineno, [_parse_float(v, c, path, lineno)
                              for v, c in zip(fields, TRIAL_COLUMNS)]))
    if not rows:
        raise TrialFormatError("a trial needs at least 1 row", path, len(lines))

    data = np.array([r for _, r in rows], dtype=np.float64)
    step = 1.0 / rate
    dt = np.diff(data[:, 0])
    bad = np.flatnonzero(np.abs(dt - step) > TIME_TOLERANCE * step)
    if bad.size:
        k = int(bad[0])
        raise TrialFormatError(
            f"time_s does not advance by 1/sample_rate_hz ({step:.17g} s), step is {dt[k]:.17g} s",
            path, rows[k + 1][0],
        )

    try:
        return Trial(
            material=material,
            emitted=Waveform(data[:, 1], rate),
            received=Waveform(data[:, 2], rate),
            trial_index=trial_index,
            grip_force_n=values["grip_force_n"],
            seed=seed,
        )
    except InputError as e:
        raise TrialFormatError(str(e), path)


def load_trials(paths: Iterable[PathLike]) -> List[Trial]:
    return [ingest_trial(p) for p in expand_inputs(paths)]


# -----------------------------
# Model files
# -----------------------------
def _pair(values) -> str:
    return ",".join(_g(v) for v in values)


def save_model(m: Model, path: PathLike) -> Path:
    lines = [
        f"format_version={FORMAT_VERSION}",
        f"feature_selection={','.join(m.feature_names)}",
        f"low_band_hz={_pair(m.band_config.low_band_hz)}",
        f"high_band_hz={_pair(m.band_config.high_band_hz)}",
        f"filter_width_hz={_g(m.band_config.filter_width_hz)}",
        f"labels={','.join(m.labels)}",
        f"mean={_pair(m.mean)}",
        f"std={_pair(m.std)}",
    ]
    lines += [f"centroid.{label}={_pair(c)}" for label, c in zip(m.labels, m.centroids)]
    return atomic_write(path, "\n".join(lines) + "\n")


def load_model(path: PathLike) -> Model:
    """Inverse of :func:`save_model`; reproduces the saved model exactly."""
    entries: Dict[str, str] = {}
    where: Dict[str, int] = {}
    for lineno, line in enumerate(_read_lines(path), start=1):
        if not line.strip():
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise TrialFormatError(f"line is not key=value: {line!r}", path, lineno)
        key = key.strip()
        if key in entries:
            raise TrialFormatError(f"duplicate key {key!r}", path, lineno)
        entries[key] = value.strip()
        where[key] = lineno

    def take(key: str) -> str:
        if key not in entries:
            raise TrialFormatError(f"missing key {key!r}", path)
        return entries[key]

    def floats(key: str) -> List[float]:
        return [_parse_float(v, key, path, where[key]) for v in take(key).split(",")]

    version = _parse_int(take("format_version"), "format_version", path, where["format_version"])
    if version != FORMAT_VERSION:
        raise TrialFormatError(f"unsupported format_version {version}", path,
                               where["format_version"])
    labels = take("labels").split(",")
    centroids = []
    for label in labels:
        key = f"centroid.{label}"
        centroids.append(floats(key))
    extra = [k for k in entries if k.startswith("centroid.") and k[len("centroid."):] not in labels]
    if extra:
        raise TrialFormatError(f"centroid for unknown label {extra[0]!r}", path, where[extra[0]])
    try:
        bands = BandConfig(tuple(floats("low_band_hz")), tuple(floats("high_band_hz")),
                           floats("filter_width_hz")[0])
        return Model(
            labels=tuple(labels),
            centroids=np.array(centroids, dtype=np.float64),
            mean=np.array(floats("mean")),
            std=np.array(floats("std")),
            feature_names=tuple(take("feature_selection").split(",")),
            band_config=bands,
        )
    except WaveTouchError as e:
        raise TrialFormatError(str(e), path)
    except ValueError as e:
        raise TrialFormatError(f"malformed model: {e}", path)


# -----------------------------
# Commands
# -----------------------------
def cmd_synth(materials: Sequence[MaterialSpec], cfg: TrialConfig, out_dir: PathLike) -> List[Path]:
    """Simulate ``cfg.num_trials`` trials per material and write one file per trial.

    Files are named ``<material>_<index:03d>.csv``.
    """
    out_dir = Path(out_dir)
    if out_dir.exists() and not out_dir.is_dir():
        raise InputError(f"{out_dir} exists and is not a directory")
    trials = synth_dataset(materials, cfg)
    written = [write_trial(t, out_dir / f"{t.label}_{t.trial_index:03d}.csv") for t in trials]
    logger.info("wrote %d trial files to %s", len(written), out_dir)
    return written


def cmd_analyze(in_paths: Sequence[PathLike], bands: BandConfig, out_path: PathLike,
                plot_path: Optional[PathLike] = None) -> Path:
    """Write emitted, received, smoothed and differential spectra as one long table.

    Parameters
    ----------
    in_paths
        Trial files (or directories of them).
    bands
        Smoothing width, and the bands marked on the optional plot.
    out_path
        CSV destination with columns trial, material, trial_index, freq_hz,
        emitted, received, emitted_smooth, received_smooth, differential.
    plot_path
        Optional SVG of the differential spectra with the low band peak marked
        and the high band trend drawn.
    """
    frames = []
    entries = []
    for path in expand_inputs(in_paths):
        t = ingest_trial(path)
        emitted = dft_magnitude(t.emitted)
        received = dft_magnitude(t.received)
        diff = differential_spectrum(emitted, received, bands.filter_width_hz)
        frames.append(pd.DataFrame({
            "trial": path.stem,
            "material": t.label,
            "trial_index": t.trial_index,
            "freq_hz": emitted.frequencies(),
            "emitted": emitted.magnitudes,
            "received": received.magnitudes,
            "emitted_smooth": uniform_filter(emitted, bands.filter_width_hz).magnitudes,
            "received_smooth": uniform_filter(received, bands.filter_width_hz).magnitudes,
            "differential": diff.values,
        }))
        if plot_path is not None:
            entries.append((path.stem, diff, low_band_peak(diff, bands.low_band_hz),
                            high_band_trend(diff, bands.high_band_hz)))

    svg = differential_svg(entries, bands) if plot_path is not None else None
    out = atomic_write(out_path, _table_csv(pd.concat(frames, ignore_index=True)))
    if svg is not None:
        atomic_write(plot_path, svg)
    logger.info("analyzed %d trials into %s", len(frames), out)
    return out


def cmd_train(in_paths: Sequence[PathLike], bands: BandConfig = STIFFNESS_BANDS,
              feature_selection: Sequence[str] = DEFAULT_FEATURE_SELECTION,
              model_out: PathLike = "model.txt") -> Model:
    names = check_feature_selection(feature_selection)
    trials = load_trials(in_paths)
    features = extract_features_batch(trials, bands)
    m = fit([(t.label, fv) for t, fv in zip(trials, features)], names, bands)
    save_model(m, model_out)
    logger.info("saved model with classes %s to %s", list(m.labels), model_out)
    return m


def cmd_classify(model_path: PathLike, in_paths: Sequence[PathLike],
                 out: Optional[TextIO] = None) -> List[Prediction]:
    """Print ``path,true_label,predicted,distance_<label>...`` for every trial."""
    m = load_model(model_path)
    paths = expand_inputs(in_paths)
    trials = [ingest_trial(p) for p in paths]
    features = extract_features_batch(trials, m.band_config)
    predictions = [predict(m, fv) for fv in features]
    table = pd.DataFrame({
        "path": [str(p) for p in paths],
        "true_label": [t.label for t in trials],
        "predicted": [p.label for p in predictions],
    })
    for label in m.labels:
        table[f"distance_{label}"] = [p.distances[label] for p in predictions]
    (out or sys.stdout).write(_table_csv(table))
    return predictions


def cmd_map(model_path: PathLike, in_paths: Sequence[PathLike], out_path: PathLike) -> ClassificationMap:
    """Write the classification map as CSV at ``out_path`` and as SVG next to it."""
    out_path = Path(out_path)
    svg_path = out_path.with_suffix(".svg")
    if svg_path == out_path:
        raise ConfigError(f"map output {out_path} must not be the .svg file itself")
    m = load_model(model_path)
    trials = load_trials(in_paths)
    features = extract_features_batch(trials, m.band_config)
    cmap = export_map(m, [(t.label, fv) for t, fv in zip(trials, features)])

    rows = [("point", p.label, *p.raw, *p.normalized) for p in cmap.points]
    for label in m.labels:
        c = np.asarray(cmap.centroids[label])
        raw = c * m.std + m.mean
        rows.append(("centroid", label, float(raw[0]), float(raw[1]), float(c[0]), float(c[1])))
    x_name, y_name = m.feature_names
    table = pd.DataFrame(rows, columns=["kind", "label", f"{x_name}_raw", f"{y_name}_raw",
                                        f"{x_name}_norm", f"{y_name}_norm"])
    svg = map_svg(cmap)
    atomic_write(out_path, _table_csv(table))
    atomic_write(svg_path, svg)
    logger.info("wrote map of %d points to %s and %s", len(cmap.points), out_path, svg_path)
    return cmap
