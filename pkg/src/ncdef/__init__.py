"""Exact computation of minimal A-infinity structures and non-commutative
deformation rings over the rationals."""

__version__ = "0.1.0"
