"""Numerical toolkit for Hardy-space reflection positivity.

Measures on [0, inf] and their transforms, outer functions and unimodular
symbols, matrix-valued rational Pick functions with degree computation,
Hankel operators from Carleson measures, and approximation-identity kernels.
"""

__version__ = "0.1.0"
