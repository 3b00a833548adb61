"""Fundamental domains of Gamma and zeta."""
__version__ = "0.1.0"
