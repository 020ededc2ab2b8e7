"""Exact computations for mixed stratified algebras and their Ringel duals."""

__version__ = "0.1.0"
