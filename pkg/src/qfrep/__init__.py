"""Exact representation counts of quadratic forms by quadratic forms and the
local/archimedean densities of the matching asymptotic main term."""

from .forms import QuadraticForm, validate

__version__ = "0.1.0"

__all__ = ["QuadraticForm", "validate", "__version__"]
