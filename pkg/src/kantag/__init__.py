"""Sequence-labeling toolkit for part-of-speech tagging."""

__version__ = "0.1.0"
