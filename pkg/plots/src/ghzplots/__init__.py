"""Figure rendering for ghzfreq sweep CSVs (display only, no physics)."""

from .render import FIGURE_IDS, FigureSpec, render
from .schema import FitRecord, SchemaError, Table, read_table

__all__ = ["FIGURE_IDS", "FigureSpec", "render", "FitRecord", "SchemaError",
           "Table", "read_table"]
