"""Publication-style figures from simulation trajectory CSV files."""
from .render import (EmptyInput, FigureError, FigureSpec, MissingColumn,
                     read_trajectory, render, sidecar_summary)

__version__ = "0.1.0"

__all__ = ["FigureSpec", "render", "read_trajectory", "sidecar_summary",
           "FigureError", "MissingColumn", "EmptyInput", "__version__"]
