"""Post-hoc figure generation from gamekinetics run artifacts.

Consumes only the documented CSV/JSON artifact files; rendering never
mutates run data.
"""

from .artifacts import MissingArtifact, SchemaMismatch, read_summary, read_table, read_timeseries
from .figures import KINDS, FigureSpec, render

__all__ = ["FigureSpec", "KINDS", "MissingArtifact", "SchemaMismatch", "render",
           "read_summary", "read_table", "read_timeseries"]
