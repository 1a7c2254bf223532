"""Exact computation with abelian-group gradings on finite-dimensional
algebras over the rationals."""

__version__ = "0.1.0"
