"""Evolving generative-art drawing programs with epsilon-lexicase selection."""

__version__ = "0.1.0"
