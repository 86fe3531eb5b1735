"""Exact and numeric tools for deformation quantization on flat phase space."""

__version__ = "0.1.0"
