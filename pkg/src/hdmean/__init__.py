"""Bootstrap test for the mean of high-dimensional data."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DimensionMismatch,
    IndexOutOfRange,
    InvalidModel,
    InvalidProbability,
    InvalidSample,
    NonConvergence,
    NotPositiveSemidefinite,
)
from .limitdist import EmpiricalCdf, WeightedChiSquare, ks_distance, sample_weighted_chisquare  # noqa: E402
from .linalg import eigen_symmetric, mean, sample_covariance_biased  # noqa: E402
from .statistic import BootstrapResult, TestConfig, run_test, v_statistic  # noqa: E402

__all__ = [
    "BootstrapResult",
    "DimensionMismatch",
    "EmpiricalCdf",
    "IndexOutOfRange",
    "InvalidModel",
    "InvalidProbability",
    "InvalidSample",
    "NonConvergence",
    "NotPositiveSemidefinite",
    "TestConfig",
    "WeightedChiSquare",
    "eigen_symmetric",
    "ks_distance",
    "mean",
    "run_test",
    "sample_covariance_biased",
    "sample_weighted_chisquare",
    "v_statistic",
]
