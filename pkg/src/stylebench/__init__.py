"""Driving-style annotation pipeline and style-modulated trajectory scoring."""

__version__ = "0.1.0"
