#!/usr/bin/env python3
"""
Evaluation script for the vibro-tactile material classifier.

Runs the stiffness, infill and soft-vs-rigid sweep experiments defined in
eval_data.py on simulated trials and reports held-out accuracy, confusion
matrices and band energy ratios.
"""

import json
from typing import Dict, List, Optional, Tuple

import numpy as np

from eval_data import evaluation_experiments
from wavetouch.classify import evaluate_model, fit, split_samples
from wavetouch.features import (
    DEFAULT_FEATURE_SELECTION,
    INFILL_BANDS,
    PRELIMINARY_BANDS,
    STIFFNESS_BANDS,
    band_energy_ratio,
    extract_features_batch,
)
from wavetouch.material_sim import TrialConfig, parse_materials, synth_dataset
from wavetouch.signals import ChirpConfig, sweep_presets

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import seaborn as sns
    HAS_PLOTTING = True
except ImportError:
    HAS_PLOTTING = False
    print("Warning: matplotlib or seaborn not available. Plots will be skipped.")

BANDS = {
    "stiffness": STIFFNESS_BANDS,
    "infill": INFILL_BANDS,
    "preliminary": PRELIMINARY_BANDS,
}


def run_classification(experiment: Dict) -> Dict:
    """Synthesize, split, fit and score one classification experiment.

    Returns
    -------
    Dict
        - accuracy: held-out accuracy
        - labels: class order of the confusion matrix
        - confusion_matrix: rows true, columns predicted
        - per_class: held-out accuracy per label
        - centroids: normalized centroid per label
    """
    bands = BANDS[experiment["bands"]]
    cfg = TrialConfig(
        chirp=sweep_presets()[experiment["sweep"]],
        noise_snr_db=experiment["snr_db"],
        seed=experiment["seed"],
        num_trials=experiment["num_trials"],
    )
    trials = synth_dataset(parse_materials(experiment["materials"]), cfg)
    features = extract_features_batch(trials, bands)
    samples = [(t.label, fv) for t, fv in zip(trials, features)]
    train, test = split_samples(samples, experiment["test_fraction"], experiment["seed"])
    model = fit(train, experiment.get("features", DEFAULT_FEATURE_SELECTION), bands)
    report = evaluate_model(model, test)

    cm = np.array(report["confusion_matrix"])
    per_class = {label: float(cm[i, i] / cm[i].sum()) for i, label in enumerate(report["labels"])}
    report["per_class"] = per_class
    report["centroids"] = {label: model.centroid(label).tolist() for label in model.labels}
    report["test_size"] = len(test)
    del report["predictions"]
    return report


def excited_band(band: Tuple[float, float], chirp: ChirpConfig) -> Optional[Tuple[float, float]]:
    """Part of ``band`` the chirp sweeps through, or None if they do not overlap."""
    lo = max(band[0], chirp.f_start_hz)
    hi = min(band[1], chirp.f_end_hz)
    if hi <= lo:
        return None
    return (lo, hi)


def run_energy(experiment: Dict) -> Dict:
    """Low and high band received/emitted energy ratios per material.

    Each band is clipped to the swept range; a band the chirp never reaches
    gets ``None``.
    """
    bands = BANDS[experiment["bands"]]
    chirp = sweep_presets()[experiment["sweep"]]
    cfg = TrialConfig(chirp=chirp, noise_snr_db=experiment["snr_db"], num_trials=1)
    low = excited_band(bands.low_band_hz, chirp)
    high = excited_band(bands.high_band_hz, chirp)
    ratios = {}
    for t in synth_dataset(parse_materials(experiment["materials"]), cfg):
        ratios[t.label] = {
            "low": band_energy_ratio(t, low) if low else None,
            "high": band_energy_ratio(t, high) if high else None,
        }
    return {"energy_ratios": ratios, "bands": {"low": low, "high": high}}


def evaluate_system(experiments: List[Dict]) -> Dict:
    """Run every experiment in order.

    Returns
    -------
    Dict
        Experiment name -> result dictionary.
    """
    results = {}
    for i, experiment in enumerate(experiments):
        print(f"[{i + 1}/{len(experiments)}] Running: {experiment['name']}...")
        try:
            if experiment["kind"] == "classify":
                results[experiment["name"]] = run_classification(experiment)
            else:
                results[experiment["name"]] = run_energy(experiment)
        except Exception as e:
            print(f"  ERROR: {e}")
            results[experiment["name"]] = {"error": str(e)}
    return results


def plot_results(eval_results: Dict, save_path: str = "evaluation_results.svg"):
    """Confusion matrices of the stiffness and infill studies plus sweep energy ratios."""
    if not HAS_PLOTTING:
        print("Skipping plots - matplotlib/seaborn not available")
        return None

    fig, axes = plt.subplots(1, 3, figsize=(20, 6))
    fig.suptitle("Vibro-tactile Material Classification", fontsize=16, fontweight="bold")

    for ax, name in zip(axes[:2], ("stiffness", "infill")):
        result = eval_results.get(name, {})
        if "confusion_matrix" not in result:
            ax.axis("off")
            continue
        sns.heatmap(np.array(result["confusion_matrix"]), annot=True, fmt="d", cmap="Blues",
                    xticklabels=result["labels"], yticklabels=result["labels"], cbar=False, ax=ax)
        ax.set_xlabel("Predicted")
        ax.set_ylabel("True")
        ax.set_title(f"{name}: accuracy {result['accuracy']:.3f}")

    ax = axes[2]
    sweeps = [n for n, r in eval_results.items() if "energy_ratios" in r]
    for material in ("Silicone12", "PLA"):
        highs = [eval_results[n]["energy_ratios"].get(material, {}).get("high") for n in sweeps]
        highs = [np.nan if h is None else h for h in highs]
        ax.plot(sweeps, highs, marker="o", label=material)
    ax.axhline(1.0, color="r", linestyle="--", lw=1)
    ax.set_ylabel("High band energy ratio (received / emitted)")
    ax.set_title("Soft vs rigid across sweeps")
    ax.legend()
    ax.grid(True, alpha=0.3)

    plt.tight_layout()
    plt.savefig(save_path, format="svg", bbox_inches="tight", metadata={"Date": None})
    print(f"\nVisualization saved to {save_path}")
    return fig


def print_detailed_results(eval_results: Dict):
    print("\n" + "=" * 80)
    print("EVALUATION RESULTS")
    print("=" * 80)

    for name, result in eval_results.items():
        print(f"\n--- {name.upper()} ---")
        if "error" in result:
            print(f"Error: {result['error']}")
        elif "accuracy" in result:
            print(f"Held-out accuracy ({result['test_size']} trials): {result['accuracy']:.4f}")
            for label, acc in result["per_class"].items():
                print(f"  {label:<18} {acc:.3f}")
            print("Confusion matrix (rows true, columns predicted):")
            for label, row in zip(result["labels"], result["confusion_matrix"]):
                print(f"  {label:<18} " + " ".join(f"{v:3d}" for v in row))
        else:
            for material, ratios in result["energy_ratios"].items():
                cells = [f"{k} " + ("not swept" if v is None else f"{v:.3f}")
                         for k, v in ratios.items()]
                print(f"  {material:<18} " + "  ".join(cells))

    print("\n" + "=" * 80)


def main():
    """
    Main evaluation function.

    Runs every experiment and generates reports.
    """
    print("Starting evaluation...")
    print("=" * 80)

    eval_results = evaluate_system(evaluation_experiments)
    print_detailed_results(eval_results)

    if HAS_PLOTTING:
        try:
            plot_results(eval_results)
        except Exception as e:
            print(f"Warning: Could not create plots: {e}")
    else:
        print("\nSkipping visualization (matplotlib/seaborn not available)")

    output_file = "evaluation_results.json"
    with open(output_file, "w") as f:
        json.dump(eval_results, f, indent=2)
    print(f"\nDetailed results saved to {output_file}")

    return eval_results


if __name__ == "__main__":
    main()
