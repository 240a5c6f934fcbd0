"""Exact computations with stratified diagram categories over finite posets."""

__version__ = "0.1.0"
