"""Bandlimited interpolation of graph signals for semi-supervised learning."""
__version__ = "0.1.0"
