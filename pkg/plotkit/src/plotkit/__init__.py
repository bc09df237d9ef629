"""Plotting companion for the online-regression simulator's result CSVs."""

from .render import (
    CURVE_COLORS,
    PLOT_KINDS,
    RESULT_COLUMNS,
    PlotInputError,
    PlotJob,
    loglog_slope,
    read_result_csv,
    render,
)

__all__ = [
    "CURVE_COLORS",
    "PLOT_KINDS",
    "RESULT_COLUMNS",
    "PlotInputError",
    "PlotJob",
    "loglog_slope",
    "read_result_csv",
    "render",
]

__version__ = "0.1.0"
