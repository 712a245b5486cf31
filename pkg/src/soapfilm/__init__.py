"""Weighted Steiner trees grown by a soap-film heuristic."""

__version__ = "0.1.0"
