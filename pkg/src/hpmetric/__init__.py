"""Hitting-probability metrics on directed graphs and Markov chains."""

__version__ = "0.1.0"
