"""Exact toolkit for finite and countable probabilistic databases."""

__version__ = "0.1.0"
