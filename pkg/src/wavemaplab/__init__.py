"""Numerical study of the stability of an explicit, globally defined
co-rotational wave map in odd dimensions ``d >= 5``, in forward hyperboloidal
similarity coordinates.

Modules: ``geometry`` (coordinates and weights), ``model`` (explicit
solution, potential, nonlinearity), ``grid`` (even Chebyshev collocation),
``evolve`` (method-of-lines flow and diagnostics), ``modes`` (mode ODE,
shooting certificate, discrete spectrum), ``verify`` and ``cli``.
"""
from .errors import ConfigError, DomainError, IntegrationError

__version__ = "0.1.0"

__all__ = ["ConfigError", "DomainError", "IntegrationError", "__version__"]
