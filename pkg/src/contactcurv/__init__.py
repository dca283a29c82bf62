"""Curvature engine for 3-dimensional contact metric manifolds."""

__version__ = "0.1.0"
