"""Gambler's-ruin model of conflict between a divided movement and its opponent,
with the coalition game deciding whether the movement unites."""

__version__ = "0.1.0"
