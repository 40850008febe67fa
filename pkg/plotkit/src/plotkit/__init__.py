"""Figure rendering for the simulator's summary CSV outputs."""

from .figures import PRESETS, FigureSpec, build, render
from .schema import SUMMARY_COLUMNS, SchemaError, read_summary

__version__ = "0.1.0"

__all__ = ["PRESETS", "FigureSpec", "build", "render", "SUMMARY_COLUMNS",
           "SchemaError", "read_summary", "__version__"]
