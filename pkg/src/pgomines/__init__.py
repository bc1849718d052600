"""Planar graph orientation (PGO) toolkit with Minesweeper-variant backends.

The package lowers CNF formulas into planar gadget networks, lowers those
networks onto Minesweeper boards through a machine-verified tile library,
and decides the consistency / inference / solvability questions for both
levels at desk scale.
"""

from pgomines.gadgets import Gadget, builtin_gadget
from pgomines.network import Assignment, BudgetExceeded, Network

__all__ = [
    "Gadget",
    "builtin_gadget",
    "Network",
    "Assignment",
    "BudgetExceeded",
]
