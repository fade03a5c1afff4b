"""Symmetry-accelerated quantum optimal control of multi-qubit spin rings."""

__version__ = "0.1.0"
