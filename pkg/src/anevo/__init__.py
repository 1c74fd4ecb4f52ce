"""Gradient-free neuroevolution with adaptive mutation resistance."""

__version__ = "0.1.0"
