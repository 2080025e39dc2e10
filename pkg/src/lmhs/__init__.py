"""Exact computations with limiting mixed Hodge structures."""

__version__ = "0.1.0"
