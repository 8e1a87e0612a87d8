"""Exact computations with Witt vectors, semidisplays and Lau group schemes."""

__version__ = "0.1.0"
