"""Batch renderer: every CSV in an experiment directory becomes a PNG."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import CsvSchemaError, PlotSpec, render_experiment


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="figviz", description="Render cqfeat experiment CSVs to PNG figures"
    )
    parser.add_argument("experiment_dir", metavar="DIR", help="directory of cqfeat CSVs")
    parser.add_argument("--out", required=True, metavar="DIR", help="output directory")
    parser.add_argument("--kind", choices=("auto", "heatmap", "bars", "lines"), default="auto")
    args = parser.parse_args(argv)

    source = Path(args.experiment_dir)
    if not source.is_dir():
        parser.error(f"{source} is not a directory")
    csvs = sorted(source.glob("*.csv"))
    if not csvs:
        print(f"{source}: no CSV files found", file=sys.stderr)
        return 1
    out_dir = Path(args.out)
    status = 0
    for csv_path in csvs:
        spec = PlotSpec(
            input_csv=csv_path,
            output_png=out_dir / (csv_path.stem + ".png"),
            kind=args.kind,
        )
        try:
            written = render_experiment(spec)
            print(f"{csv_path} -> {written}")
        except CsvSchemaError as exc:
            print(f"{csv_path}: schema error: {exc}", file=sys.stderr)
            status = 1
    return status


if __name__ == "__main__":
    sys.exit(main())
