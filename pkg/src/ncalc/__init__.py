"""Discrete and formal neighbour calculus: monads, 1-forms, connections and jets."""

__version__ = "0.1.0"
