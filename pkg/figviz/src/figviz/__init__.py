"""Static-figure rendering for cqfeat CSV outputs."""

from .render import CsvSchemaError, PlotSpec, build_figure, parse_csv, render_experiment

__version__ = "0.1.0"
