"""Numerical verification toolkit for the partially averaged three-body potential."""

__version__ = "0.1.0"
