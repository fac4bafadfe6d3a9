"""Proof-theory toolkit for the logic of Bunched Implications."""

__version__ = "0.1.0"
