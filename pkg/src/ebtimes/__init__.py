"""Asymptotic structure and entanglement-breaking times of quantum channels."""

__version__ = "0.1.0"
