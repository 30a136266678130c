"""Spectral toolkit for the quantum nonlinear oscillator with mass 1/(1 + lam x^2).

Closed-form spectra and eigenfunctions of the solvable families, the
lambda-deformed Hermite polynomials, supersymmetric ladder constructions,
the quasi-exactly solvable sextic family, and a finite-difference
Sturm-Liouville solver used to check all of them.
"""

from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
