"""Command-line interface: extraction, experiment runners, and a benchmark."""

from __future__ import annotations

import argparse
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from .analysis import (
    LabeledFeatureSet,
    deformation_experiment,
    f_ratio,
    harmonic_spacing_experiment,
    temporal_span_profile,
)
from .config import ConfigError, RunConfig
from .cqt import cqt
from .cwt import cwt_framed
from .featfile import read_feature, write_experiment_csv, write_feature, write_matrix_csv
from .mel import mfsc
from .pipeline import extract_file
from .preprocess import resample_to_16k
from .signal import Signal

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

_REP_CHOICES = ("cqt", "cwt", "mfsc")


def _load_config(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    if getattr(args, "rep", None):
        cfg.set("rep", args.rep)
    if getattr(args, "no_vad", False):
        cfg.set("vad", False)
    if getattr(args, "no_cmvn", False):
        cfg.set("cmvn", False)
    if getattr(args, "epsilon", None) is not None:
        cfg.set("epsilon", args.epsilon)
    return cfg


def _cmd_extract(args) -> int:
    cfg = _load_config(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    status = EXIT_OK
    for wav in args.inputs:
        wav = Path(wav)
        target = out_dir / (wav.stem + (".csv" if args.format == "csv" else ".cqfb"))
        try:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                matrix = extract_file(wav, cfg)
            for w in caught:
                print(f"{wav}: note: {w.message}", file=sys.stderr)
            if args.format == "csv":
                write_matrix_csv(target, matrix)
            else:
                write_feature(target, matrix)
            print(f"{wav} -> {target} ({matrix.n_bins} x {matrix.n_frames})")
        except Exception as exc:
            print(f"{wav}: error: {exc}", file=sys.stderr)
            status = EXIT_FAILURE
    return status


def _read_manifest(path):
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            label, _, feat_path = stripped.partition(",")
            if not label or not feat_path:
                raise ValueError(f"{path}:{lineno}: expected 'label,path'")
            entries.append((label.strip(), Path(feat_path.strip())))
    if not entries:
        raise ValueError(f"{path}: empty manifest")
    return entries


def _run_fratio(args, cfg, out_dir) -> list:
    entries = _read_manifest(args.manifest)
    by_rep = {}
    for label, feat_path in entries:
        matrix = read_feature(feat_path)
        by_rep.setdefault(matrix.representation_tag, []).append((matrix, label))
    written = []
    for rep, pairs in sorted(by_rep.items()):
        fs = LabeledFeatureSet(tuple(pairs))
        ratios = f_ratio(fs, args.target, args.reference)
        path = out_dir / f"fratio_{rep.lower()}.csv"
        write_experiment_csv(
            path,
            "fratio",
            {"rep": rep, "target": args.target, "reference": args.reference},
            ["bin_frequency_hz", "f_ratio"],
            [(float(f), float(v)) for f, v in zip(fs.bin_frequencies, ratios)],
        )
        written.append(path)
    return written


def _run_harmonics(args, cfg, out_dir) -> list:
    results = harmonic_spacing_experiment(
        cqt_params=cfg.cqt_params(), mel_params=cfg.mel_params()
    )
    written = []
    for rep, rows in results.items():
        path = out_dir / f"harmonics_{rep.lower()}.csv"
        write_experiment_csv(
            path,
            "harmonics",
            {"rep": rep, "n_harmonics": 6},
            ["f0_hz", "bin_f0", "bin_2f0", "spacing_bins"],
            [(r.f0, r.bin_f0, r.bin_2f0, r.spacing) for r in rows],
        )
        written.append(path)
    return written


def _run_deform(args, cfg, out_dir) -> list:
    epsilon = float(cfg.get("epsilon"))
    results = deformation_experiment(
        epsilon, cqt_params=cfg.cqt_params(), mel_params=cfg.mel_params()
    )
    written = []
    for rep, rows in results.items():
        path = out_dir / f"deform_{rep.lower()}.csv"
        write_experiment_csv(
            path,
            "deform",
            {"rep": rep, "epsilon": epsilon},
            ["tone_hz", "bin_original", "bin_warped", "displacement_bins"],
            [(r.tone, r.bin_original, r.bin_warped, r.displacement) for r in rows],
        )
        written.append(path)
    return written


def _run_span(args, cfg, out_dir) -> list:
    reps = [args.rep] if args.rep else list(_REP_CHOICES)
    params = {"cqt": cfg.cqt_params(), "cwt": cfg.cwt_params(), "mfsc": cfg.mel_params()}
    written = []
    for rep in reps:
        kind = rep.upper()
        support = temporal_span_profile(kind, params[rep], measure="support")
        energy = temporal_span_profile(kind, params[rep], measure="energy99")
        path = out_dir / f"span_{rep}.csv"
        write_experiment_csv(
            path,
            "span",
            {"rep": kind},
            ["bin_frequency_hz", "span_support_s", "span_energy99_s"],
            list(zip(map(float, support.frequencies),
                     map(float, support.spans),
                     map(float, energy.spans))),
        )
        written.append(path)
    return written


def _cmd_experiment(args) -> int:
    cfg = _load_config(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    runners = {
        "fratio": _run_fratio,
        "harmonics": _run_harmonics,
        "deform": _run_deform,
        "span": _run_span,
    }
    try:
        written = runners[args.name](args, cfg, out_dir)
    except Exception as exc:
        print(f"experiment {args.name}: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_bench(args) -> int:
    cfg = _load_config(args)
    reps = args.rep or list(_REP_CHOICES)
    rng = np.random.default_rng(0)
    noise = Signal(0.1 * rng.standard_normal(int(args.seconds * 16000)), 16000)
    noise = resample_to_16k(noise)
    front_ends = {
        "cqt": lambda: cqt(noise, cfg.cqt_params(), mode="fast"),
        "cwt": lambda: cwt_framed(noise, cfg.cwt_params()),
        "mfsc": lambda: mfsc(noise, cfg.mel_params()),
    }
    print(f"benchmark: {args.seconds:g} s of noise, {args.runs} runs per representation")
    print("representation  mean_s    std_s     runs")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for rep in reps:
            front_ends[rep]()  # warm-up
            times = []
            for _ in range(args.runs):
                start = time.perf_counter()
                front_ends[rep]()
                times.append(time.perf_counter() - start)
            times = np.asarray(times)
            print(f"{rep:<14}  {times.mean():.6f}  {times.std():.6f}  {len(times)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cqfeat",
        description="Constant-Q, wavelet, and mel time-frequency feature extraction",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    extract = sub.add_parser("extract", help="extract features from WAV files")
    extract.add_argument("inputs", nargs="+", metavar="WAV")
    extract.add_argument("--rep", choices=_REP_CHOICES)
    extract.add_argument("--config", metavar="PATH")
    extract.add_argument("--no-vad", action="store_true")
    extract.add_argument("--no-cmvn", action="store_true")
    extract.add_argument("--format", choices=("csv", "cqfb"), default="cqfb")
    extract.add_argument("--out", required=True, metavar="DIR")
    extract.set_defaults(func=_cmd_extract)

    experiment = sub.add_parser("experiment", help="run an analysis experiment")
    experiment.add_argument("name", choices=("fratio", "harmonics", "deform", "span"))
    experiment.add_argument("--config", metavar="PATH")
    experiment.add_argument("--epsilon", type=float)
    experiment.add_argument("--rep", choices=_REP_CHOICES)
    experiment.add_argument("--manifest", metavar="PATH")
    experiment.add_argument("--target", default="target")
    experiment.add_argument("--reference", default="reference")
    experiment.add_argument("--out", required=True, metavar="DIR")
    experiment.set_defaults(func=_cmd_experiment)

    bench = sub.add_parser("bench", help="wall-time micro-benchmark")
    bench.add_argument("--seconds", type=float, default=1.0)
    bench.add_argument("--runs", type=int, default=20)
    bench.add_argument("--rep", choices=_REP_CHOICES, action="append")
    bench.add_argument("--config", metavar="PATH")
    bench.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "experiment" and args.name == "fratio" and not args.manifest:
        parser.error("experiment fratio requires --manifest")
    if args.command == "bench" and (args.seconds <= 0 or args.runs < 1):
        parser.error("bench needs positive --seconds and --runs")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
