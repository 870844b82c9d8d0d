"""Numerical laboratory for the Poisson summation formula in weighted spaces."""

from .regime import INF, ParamPoint, classify_abs, classify_abs_two_sided, classify_psf, gamma_exponent
from .bump import BumpKernel, default_kernel

__version__ = "0.1.0"

__all__ = [
    "INF",
    "ParamPoint",
    "classify_psf",
    "classify_abs",
    "classify_abs_two_sided",
    "gamma_exponent",
    "BumpKernel",
    "default_kernel",
    "__version__",
]
