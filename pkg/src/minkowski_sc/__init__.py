"""Minkowski-plane geometry and rectifiability certificates for self-contracted curves."""

__version__ = "0.1.0"
