"""Whittaker index transforms: special functions of complex index,
adaptive quadrature, identity residual checks, and transform pairs."""

from . import errors, identities, quadrature, specfun, transforms

__version__ = "0.1.0"

__all__ = ["errors", "quadrature", "specfun", "identities", "transforms",
           "__version__"]
