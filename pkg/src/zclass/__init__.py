"""Numerical toolkit for Z-class J-modules, integrable kernels and their transfer matrices."""

__version__ = "0.1.0"
