"""Finite-field counting workbench for Hall algebras of 0-dimensional sheaves."""

__version__ = "0.1.0"
