"""Numerical laboratory for the cubic wave equation u_tt - Lap u + u^3 = 0 on periodic boxes."""

from ._kernels import backend

__version__ = "0.1.0"
