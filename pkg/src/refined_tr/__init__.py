"""Exact refined topological recursion on genus-zero hyperelliptic curves."""

__version__ = "0.1.0"
