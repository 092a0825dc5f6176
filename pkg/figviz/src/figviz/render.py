"""Parse cqfeat CSV outputs and render them as static figures.

Two CSV shapes are understood: extraction matrices (header row starting with
``bin_frequency_hz,frame_0``) and experiment tables (a ``# experiment=...``
comment line, then a header row).  Extraction matrices render as heatmaps
with log-frequency tick labels; ``fratio`` tables as bar charts; ``span``,
``harmonics``, and ``deform`` tables as line plots.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["CsvSchemaError", "PlotSpec", "parse_csv", "build_figure", "render_experiment"]


class CsvSchemaError(ValueError):
    """The CSV does not match the cqfeat output schema."""


@dataclass
class PlotSpec:
    """What to render: input CSV, plot kind, labels, and output path."""

    input_csv: Path
    output_png: Path
    kind: str = "auto"  # auto | heatmap | bars | lines
    title: str = ""
    x_label: str = ""
    y_label: str = ""

    def __post_init__(self):
        self.input_csv = Path(self.input_csv)
        self.output_png = Path(self.output_png)
        if self.kind not in ("auto", "heatmap", "bars", "lines"):
            raise ValueError(f"unknown plot kind {self.kind!r}")
        if not self.input_csv.exists():
            raise CsvSchemaError(f"{self.input_csv}: no such file")


@dataclass
class ParsedCsv:
    experiment: str           # "extraction" for matrix CSVs
    params: dict
    columns: list
    rows: np.ndarray
    meta: dict = field(default_factory=dict)


def _parse_meta(line: str) -> tuple:
    tokens = line[1:].strip().split()
    params = {}
    experiment = None
    for token in tokens:
        if "=" not in token:
            raise CsvSchemaError(f"malformed comment token {token!r}")
        key, _, value = token.partition("=")
        if key == "experiment":
            experiment = value
        else:
            params[key] = value
    if not experiment:
        raise CsvSchemaError("comment line lacks experiment=<name>")
    return experiment, params


def parse_csv(path) -> ParsedCsv:
    """Parse an extraction or experiment CSV, validating its schema."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CsvSchemaError(f"{path}: {exc}") from exc
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise CsvSchemaError(f"{path}: empty file")
    experiment, params = "extraction", {}
    if lines[0].startswith("#"):
        experiment, params = _parse_meta(lines[0])
        lines = lines[1:]
        if not lines:
            raise CsvSchemaError(f"{path}: header row missing")
    columns = [c.strip() for c in lines[0].split(",")]
    if columns[0] != "bin_frequency_hz" and experiment == "extraction":
        raise CsvSchemaError(
            f"{path}: expected a bin_frequency_hz first column, got {columns[0]!r}"
        )
    data = []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(columns):
            raise CsvSchemaError(
                f"{path}:{lineno}: {len(cells)} cells but {len(columns)} columns"
            )
        try:
            data.append([float(c) for c in cells])
        except ValueError as exc:
            raise CsvSchemaError(f"{path}:{lineno}: non-numeric cell") from exc
    if not data:
        raise CsvSchemaError(f"{path}: no data rows")
    return ParsedCsv(experiment, params, columns, np.asarray(data))


_KIND_BY_EXPERIMENT = {
    "extraction": "heatmap",
    "fratio": "bars",
    "span": "lines",
    "harmonics": "lines",
    "deform": "lines",
}


def _heatmap(ax, parsed: ParsedCsv, spec: PlotSpec):
    freqs = parsed.rows[:, 0]
    values = parsed.rows[:, 1:]
    image = ax.imshow(values, origin="lower", aspect="auto", cmap="magma")
    ticks = np.linspace(0, len(freqs) - 1, min(8, len(freqs))).astype(int)
    ax.set_yticks(ticks)
    ax.set_yticklabels([f"{freqs[t]:.0f}" for t in ticks])
    ax.set_xlabel(spec.x_label or "frame")
    ax.set_ylabel(spec.y_label or "bin center frequency (Hz)")
    return image


def _bars(ax, parsed: ParsedCsv, spec: PlotSpec):
    x = parsed.rows[:, 0]
    heights = parsed.rows[:, 1]
    ax.bar(np.arange(len(x)), heights, color="#31688e")
    ticks = np.linspace(0, len(x) - 1, min(8, len(x))).astype(int)
    ax.set_xticks(ticks)
    ax.set_xticklabels([f"{x[t]:.0f}" for t in ticks])
    ax.set_xlabel(spec.x_label or parsed.columns[0])
    ax.set_ylabel(spec.y_label or parsed.columns[1])


def _lines(ax, parsed: ParsedCsv, spec: PlotSpec):
    x = parsed.rows[:, 0]
    for column in range(1, parsed.rows.shape[1]):
        ax.plot(x, parsed.rows[:, column], marker="o", label=parsed.columns[column])
    if parsed.experiment == "span":
        ax.set_xscale("log")
    ax.legend(loc="best", fontsize="small")
    ax.set_xlabel(spec.x_label or parsed.columns[0])
    ax.set_ylabel(spec.y_label or "value")


def build_figure(spec: PlotSpec):
    """Build the matplotlib figure for a spec; the caller owns closing it."""
    parsed = parse_csv(spec.input_csv)
    kind = spec.kind if spec.kind != "auto" else _KIND_BY_EXPERIMENT.get(parsed.experiment)
    if kind is None:
        raise CsvSchemaError(
            f"{spec.input_csv}: no default plot kind for experiment {parsed.experiment!r}"
        )
    fig, ax = plt.subplots(figsize=(8.0, 4.5), dpi=110)
    renderers = {"heatmap": _heatmap, "bars": _bars, "lines": _lines}
    artist = renderers[kind](ax, parsed, spec)
    if kind == "heatmap":
        fig.colorbar(artist, ax=ax, shrink=0.9)
    meta = " ".join(f"{k}={v}" for k, v in parsed.params.items())
    ax.set_title(spec.title or f"{parsed.experiment} {meta}".strip())
    fig.tight_layout()
    return fig


def render_experiment(spec: PlotSpec) -> Path:
    """Render one CSV to its PNG; returns the written path."""
    fig = build_figure(spec)
    try:
        spec.output_png.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(spec.output_png, format="png")
    finally:
        plt.close(fig)
    return spec.output_png
