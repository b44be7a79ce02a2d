"""Exact combinatorics of affine threefolds with a hyperbolic one-dimensional torus action."""

__version__ = "0.1.0"
