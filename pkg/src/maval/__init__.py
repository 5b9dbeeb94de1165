"""Exact and numerical laboratory for polynomial local functionals on convex functions."""

__version__ = "0.1.0"
