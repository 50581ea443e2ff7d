"""Wronskian connection-matrix solver for 1D quantum scattering."""
__version__ = "0.1.0"
