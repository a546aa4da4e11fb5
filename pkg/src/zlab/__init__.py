"""Spectral laboratory for the 1D Zakharov system with Yosida regularisation."""

__version__ = "0.1.0"
