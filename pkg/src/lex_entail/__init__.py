"""Prompting and evaluation harness for statute-law entailment tasks."""

__version__ = "0.1.0"
