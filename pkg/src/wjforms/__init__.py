"""Exact arithmetic for weight-0 weak Jacobi forms and their growth data."""

from wjforms.qseries import (
    BeyondTruncation,
    BiSeries,
    InexactDivision,
    NonIntegralExponent,
    NonUnitLeading,
    QSeriesError,
)

__version__ = "0.1.0"

__all__ = [
    "BiSeries",
    "QSeriesError",
    "BeyondTruncation",
    "NonUnitLeading",
    "NonIntegralExponent",
    "InexactDivision",
    "__version__",
]
