"""Exact lattice computations for K3 Néron–Severi classification problems."""

__version__ = "0.1.0"
