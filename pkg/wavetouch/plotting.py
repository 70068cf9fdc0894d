# wavetouch/plotting.py
"""
Static SVG figures: the classification map and differential spectra.

Figures are rendered to bytes so callers can write them atomically.
"""

import io
from typing import Sequence, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402
import seaborn as sns  # noqa: E402

from wavetouch.classify import ClassificationMap  # noqa: E402
from wavetouch.features import FEATURES, BandConfig  # noqa: E402
from wavetouch.signals import SignedSpectrum  # noqa: E402

# fixed element ids and no timestamp, so reruns give identical files
SVG_RC = {"svg.hashsalt": "wavetouch", "svg.fonttype": "path"}

AXIS_LABELS = {
    "peak_freq": "low band peak frequency (normalized)",
    "peak_mag": "low band peak value (normalized)",
    "slope": "high band trend slope (normalized)",
}


def _to_svg(fig) -> bytes:
    buf = io.BytesIO()
    with plt.rc_context(SVG_RC):
        fig.savefig(buf, format="svg", bbox_inches="tight", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()


def map_svg(cmap: ClassificationMap) -> bytes:
    """Scatter of normalized features coloured by label, centroids marked with crosses."""
    labels = sorted(cmap.centroids)
    palette = dict(zip(labels, sns.color_palette("tab10", len(labels))))
    points = pd.DataFrame(
        [(p.label, p.normalized[0], p.normalized[1]) for p in cmap.points],
        columns=["label", "x", "y"],
    )
    x_name, y_name = cmap.feature_names

    with plt.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(7, 5.5))
        if not points.empty:
            sns.scatterplot(data=points, x="x", y="y", hue="label", hue_order=labels,
                            palette=palette, s=28, alpha=0.7, edgecolor="none", ax=ax)
        for label in labels:
            cx, cy = cmap.centroids[label]
            ax.scatter([cx], [cy], marker="X", s=160, color=palette[label],
                       edgecolors="black", linewidths=1.0, zorder=3)
            ax.annotate(label, (cx, cy), textcoords="offset points", xytext=(6, 6), fontsize=9)
        ax.set_xlabel(AXIS_LABELS.get(x_name, FEATURES.get(x_name, x_name)))
        ax.set_ylabel(AXIS_LABELS.get(y_name, FEATURES.get(y_name, y_name)))
        ax.set_title("Classification map")
        ax.grid(True, alpha=0.3)
        if ax.get_legend() is not None:
            ax.legend(title="material", bbox_to_anchor=(1.02, 1), loc="upper left")
    return _to_svg(fig)


DiffEntry = Tuple[str, SignedSpectrum, Tuple[float, float], float]


def differential_svg(entries: Sequence[DiffEntry], bands: BandConfig) -> bytes:
    """Differential spectra over both bands.

    Parameters
    ----------
    entries
        (trial name, differential spectrum, (peak_freq_hz, peak_value), slope).
    bands
        Bands to shade; the high band trend line is drawn over its band.
    """
    lo, _ = bands.low_band_hz
    _, hi = bands.high_band_hz
    colors = sns.color_palette("husl", max(len(entries), 1))

    with plt.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(9, 5))
        ax.axvspan(*bands.low_band_hz, color="0.92", zorder=0)
        ax.axvspan(*bands.high_band_hz, color="0.97", zorder=0)
        ax.axhline(0.0, color="0.4", lw=0.8)
        for (name, diff, (peak_f, peak_v), slope), color in zip(entries, colors):
            idx = diff.band_indices((lo, hi))
            freqs = diff.frequencies()[idx]
            ax.plot(freqs, diff.values[idx], color=color, lw=1.0, label=name)
            ax.plot([peak_f], [peak_v], marker="o", color=color, markeredgecolor="black")

            hidx = diff.band_indices(bands.high_band_hz)
            hf = diff.frequencies()[hidx]
            hv = diff.values[hidx]
            intercept = float(np.mean(hv)) - slope * float(np.mean(hf))
            ax.plot(hf, intercept + slope * hf, color=color, ls="--", lw=1.2)
        ax.set_xlabel("frequency (Hz)")
        ax.set_ylabel("received - emitted magnitude")
        ax.set_title("Differential spectra")
        ax.grid(True, alpha=0.3)
        if entries:
            ax.legend(fontsize=7, bbox_to_anchor=(1.02, 1), loc="upper left")
    return _to_svg(fig)
