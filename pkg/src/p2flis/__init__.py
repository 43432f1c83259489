"""Penrose P2 tilings, their dual graphs, and fully leafed induced subtrees."""

__version__ = "0.1.0"
