"""Numerical construction and verification of Dirac-harmonic maps."""

__version__ = "0.1.0"
