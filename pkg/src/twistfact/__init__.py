"""Twisted elliptic-curve L-values, their factorization in Z[zeta_d], and the
Galois-module data they are compared against."""

__version__ = "0.1.0"
