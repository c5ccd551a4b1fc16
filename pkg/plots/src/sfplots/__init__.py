"""Publication-style figures from routing-experiment CSV files."""

from .csvio import SchemaError, read_rows, require_columns
from .fits import fit_power_law
from .figures import PlotSpec, plot_scaling_loglog, plot_theta_curves

__version__ = "0.1.0"

__all__ = [
    "PlotSpec",
    "SchemaError",
    "fit_power_law",
    "plot_scaling_loglog",
    "plot_theta_curves",
    "read_rows",
    "require_columns",
]
