"""Desk-scale laboratory for the delta-method subconvexity argument."""

__version__ = "0.1.0"
