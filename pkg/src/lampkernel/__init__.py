"""Kernel dimension of switch-walk-switch lamplighter operators over free
groups, computed exactly and checked by Monte Carlo percolation."""

__version__ = "0.1.0"
