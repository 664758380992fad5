"""Asymptotic (non-properness) sets of quadratic polynomial maps via facon limits."""

from .poly import GaussianRational, Polynomial, PolynomialMapping, mapping, variables
from .parser import ParseError, parse_mapping, render_mapping

__version__ = "0.1.0"

__all__ = [
    "GaussianRational",
    "Polynomial",
    "PolynomialMapping",
    "mapping",
    "variables",
    "ParseError",
    "parse_mapping",
    "render_mapping",
]
