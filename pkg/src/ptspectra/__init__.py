"""Spectra of 1D second-derivative operators with PT-symmetric point interactions."""

__version__ = "0.1.0"

from .boundary_conditions import (  # noqa: E402
    BoundaryTraces,
    ConnectedParams,
    SeparatedParams,
    SymmetricParams,
)
from .interval import IntervalModel, RegimeError, classify, eigenvalues_in_region  # noqa: E402
from .line_model import LineModel  # noqa: E402
from .roots import Rectangle, RootConfig, find_roots  # noqa: E402

__all__ = [
    "BoundaryTraces", "ConnectedParams", "SeparatedParams", "SymmetricParams",
    "IntervalModel", "RegimeError", "classify", "eigenvalues_in_region",
    "LineModel", "Rectangle", "RootConfig", "find_roots",
]
