"""Numerical ranges of random matrices via the support function."""

__version__ = "0.1.0"
