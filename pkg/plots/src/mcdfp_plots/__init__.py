"""Figure rendering for mcdfp run directories."""

from .render import KINDS, PlotInputError, PlotSpec, RunData, load_run, mean_curve, render

__all__ = [
    "KINDS",
    "PlotInputError",
    "PlotSpec",
    "RunData",
    "load_run",
    "mean_curve",
    "render",
]

__version__ = "0.1.0"
