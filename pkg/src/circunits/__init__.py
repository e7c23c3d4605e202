"""Circular units of real abelian fields along cyclotomic Z_p-towers."""

__version__ = "0.1.0"
