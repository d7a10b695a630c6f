"""Simulation and verification toolkit for the random greedy triangle-removal process."""

__version__ = "0.1.0"
