"""Batch figure rendering for isingpt benchmark outputs."""

from .figures import (FIGURE_KINDS, FigureSpec, PlotError, RenderResult,
                      fit_log_log, render)

__version__ = "0.1.0"

__all__ = ["FIGURE_KINDS", "FigureSpec", "PlotError", "RenderResult",
           "fit_log_log", "render"]
