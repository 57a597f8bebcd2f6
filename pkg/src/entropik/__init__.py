"""Degree growth and complexity of K = I o J on patterned matrices."""

__version__ = "0.1.0"
