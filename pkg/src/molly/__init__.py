"""Retrieval-augmented tutoring agent for Python programming QA."""

__version__ = "0.1.0"
