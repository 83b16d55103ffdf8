"""Invariant adaptive detection of subspace signals in Gaussian and subspace interference."""

__version__ = "0.1.0"
