"""Exact computation with internal groupoids in finite base categories."""

__version__ = "0.1.0"
