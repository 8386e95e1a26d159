"""Exact and asymptotic computations for orthogonal polynomials with the complex weight exp(-N s z) on [-1, 1]."""

__version__ = "0.1.0"
