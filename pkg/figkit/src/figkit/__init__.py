"""figkit: offline figure rendering for qsteer trajectory exports."""

__version__ = "0.1.0"

from .plots import plot_bloch, plot_objective
from .table import TableError, TrajectoryTable

__all__ = ["TableError", "TrajectoryTable", "plot_bloch", "plot_objective",
           "__version__"]
