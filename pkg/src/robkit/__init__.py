"""robkit: outlier-resistant statistics.

Robust univariate scales, covariance matrices, regression, principal
components, cellwise anomaly detection and the preprocessing around them,
plus data generators for the associated diagnostic plots.
"""

from . import kernel, univariate  # noqa: F401
from .frame import Frame, read_csv, write_csv  # noqa: F401

__version__ = "0.1.0"
