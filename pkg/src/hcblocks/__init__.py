"""Exact block theory for finite-dimensional algebras and truncated Harish-Chandra pairs."""

__version__ = "0.1.0"
