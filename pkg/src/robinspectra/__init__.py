"""Spectral laboratory for the quarter-plane Laplacian with
coordinate-dependent Robin boundary conditions."""

__version__ = "0.1.0"
