"""Chart rendering for experiment summary CSVs.

Reads only the documented summary schemas (maxcut_summary_v1,
heisenberg_summary_v1); never touches raw per-run traces.
"""

from .render import (
    DataError,
    HEIS_COLUMNS,
    KINDS,
    MAXCUT_COLUMNS,
    PlotJob,
    SchemaError,
    render,
)

__all__ = [
    "DataError",
    "HEIS_COLUMNS",
    "KINDS",
    "MAXCUT_COLUMNS",
    "PlotJob",
    "SchemaError",
    "render",
]
