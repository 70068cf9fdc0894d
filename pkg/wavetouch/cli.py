# wavetouch/cli.py
"""
Command line entry point: ``python -m wavetouch <command> ...``.

Exit codes: 0 success, 1 invalid input, 2 invalid configuration or usage.
"""

import argparse
import logging
import sys
from typing import List, Optional, Tuple

from wavetouch import config
from wavetouch.errors import ConfigError, InputError, WaveTouchError
from wavetouch.features import (
    DEFAULT_FEATURE_SELECTION,
    DEFAULT_FILTER_WIDTH_HZ,
    DEFAULT_HIGH_BAND_HZ,
    DEFAULT_LOW_BAND_HZ,
    BandConfig,
    check_feature_selection,
)
from wavetouch.material_sim import DEFAULT_NUM_TRIALS, DEFAULT_SNR_DB, TrialConfig, parse_materials
from wavetouch.pipeline import cmd_analyze, cmd_classify, cmd_map, cmd_synth, cmd_train
from wavetouch.signals import (
    DEFAULT_DURATION_S,
    DEFAULT_F_END_HZ,
    DEFAULT_F_START_HZ,
    DEFAULT_SAMPLE_RATE_HZ,
    ChirpConfig,
)

logger = logging.getLogger(__name__)


def parse_range(text: str) -> Tuple[float, float]:
    """``"LO:HI"`` -> (LO, HI)."""
    lo, sep, hi = text.partition(":")
    if not sep:
        raise ConfigError(f"expected LO:HI, got {text!r}")
    try:
        return float(lo), float(hi)
    except ValueError:
        raise ConfigError(f"expected LO:HI with numbers, got {text!r}")


def parse_features(text: str) -> Tuple[str, str]:
    return check_feature_selection([part.strip() for part in text.split(",")])


def _fmt_range(band) -> str:
    return f"{band[0]:g}:{band[1]:g}"


def _bands(args) -> BandConfig:
    return BandConfig(parse_range(args.band_low), parse_range(args.band_high), args.filter_hz)


def _add_band_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--band-low", default=_fmt_range(DEFAULT_LOW_BAND_HZ), metavar="LO:HI",
                   help="low analysis band in Hz")
    p.add_argument("--band-high", default=_fmt_range(DEFAULT_HIGH_BAND_HZ), metavar="LO:HI",
                   help="high analysis band in Hz")
    p.add_argument("--filter-hz", type=float, default=DEFAULT_FILTER_WIDTH_HZ, metavar="W",
                   help="uniform filter width in Hz")


# -----------------------------
# Command handlers
# -----------------------------
def run_synth(args) -> None:
    lo, hi = parse_range(args.sweep)
    chirp = ChirpConfig(f_start_hz=lo, f_end_hz=hi, duration_s=args.duration,
                        sample_rate_hz=args.sample_rate)
    cfg = TrialConfig(
        chirp=chirp,
        grip_force_n=args.grip_force,
        noise_snr_db=None if args.noiseless else args.snr_db,
        seed=config.resolve_seed(args.seed),
        num_trials=args.trials,
    )
    written = cmd_synth(parse_materials(args.materials), cfg, args.out)
    print(f"wrote {len(written)} trial files to {args.out}")


def run_analyze(args) -> None:
    out = cmd_analyze(args.inputs, _bands(args), args.out, args.plot)
    print(f"wrote {out}")


def run_train(args) -> None:
    m = cmd_train(args.inputs, _bands(args), parse_features(args.features), args.model_out)
    print(f"trained {len(m.labels)} classes ({','.join(m.labels)}); model written to {args.model_out}")


def run_classify(args) -> None:
    cmd_classify(args.model, args.inputs, sys.stdout)


def run_map(args) -> None:
    cmap = cmd_map(args.model, args.inputs, args.out)
    print(f"wrote map of {len(cmap.points)} points to {args.out}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wavetouch",
        description="Vibro-tactile material sensing: synthesize, analyze, train, classify, map.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic trial dataset")
    p.add_argument("--materials", default="stiffness",
                   help="builtin | stiffness | infill | comma list of names or name=E_MPa[@infill]")
    p.add_argument("--trials", type=int, default=DEFAULT_NUM_TRIALS, help="trials per material")
    noise = p.add_mutually_exclusive_group()
    noise.add_argument("--snr-db", type=float, default=DEFAULT_SNR_DB, help="per-sensor SNR in dB")
    noise.add_argument("--noiseless", action="store_true", help="omit sensor noise")
    p.add_argument("--seed", type=int, default=0,
                   help=f"noise seed (env:{config.SEED_ENV} takes precedence)")
    p.add_argument("--sweep", default=f"{DEFAULT_F_START_HZ:g}:{DEFAULT_F_END_HZ:g}",
                   metavar="LO:HI", help="chirp start and end frequency in Hz")
    p.add_argument("--duration", type=float, default=DEFAULT_DURATION_S, help="chirp length in s")
    p.add_argument("--sample-rate", type=float, default=DEFAULT_SAMPLE_RATE_HZ, help="Hz")
    p.add_argument("--grip-force", type=float, default=1.0, help="recorded grip force in N")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=run_synth)

    p = sub.add_parser("analyze", help="export spectra and differential spectra")
    _add_band_flags(p)
    p.add_argument("--out", required=True, help="output CSV")
    p.add_argument("--plot", default=None, help="optional SVG of the differential spectra")
    p.add_argument("inputs", nargs="+", help="trial files or directories")
    p.set_defaults(func=run_analyze)

    p = sub.add_parser("train", help="fit a nearest-centroid model")
    _add_band_flags(p)
    p.add_argument("--features", default=",".join(DEFAULT_FEATURE_SELECTION),
                   help="two of peak_freq, peak_mag, slope")
    p.add_argument("--model-out", required=True, help="model file to write")
    p.add_argument("inputs", nargs="+", help="trial files or directories")
    p.set_defaults(func=run_train)

    p = sub.add_parser("classify", help="predict labels for trials")
    p.add_argument("--model", required=True, help="model file")
    p.add_argument("inputs", nargs="+", help="trial files or directories")
    p.set_defaults(func=run_classify)

    p = sub.add_parser("map", help="export the classification map (CSV and SVG)")
    p.add_argument("--model", required=True, help="model file")
    p.add_argument("--out", required=True, help="output CSV; the SVG is written next to it")
    p.add_argument("inputs", nargs="+", help="trial files or directories")
    p.set_defaults(func=run_map)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        logging.basicConfig(
            level=config.log_level(),
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
            stream=sys.stderr,
        )
        args.func(args)
    except WaveTouchError as e:
        print(f"wavetouch {args.command}: error: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"wavetouch {args.command}: error: {e}", file=sys.stderr)
        return InputError.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
