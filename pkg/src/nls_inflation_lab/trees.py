"""Ternary trees indexing the terms of the cubic Duhamel power series.

A tree is either a leaf (an occurrence of the initial datum) or an internal
node with exactly three ordered children (one application of the trilinear
Duhamel integral; the middle slot is complex conjugated). The generation j of
a tree is its number of internal nodes, so a generation-j tree has 2j + 1
leaves. T(j) denotes the set of generation-j trees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional

#: Practical cap on the generation for explicit enumeration.
ENUM_CAP = 8

#: Growth constant: #T(j) <= C0^j / (1+j)^2 with C0 = 9 * (sum (1+k)^-2)^2.
C0 = 9.0 * (math.pi**2 / 6.0) ** 2


class EnumerationCapError(RuntimeError):
    """Raised when asked to materialize a tree generation beyond ENUM_CAP."""


@dataclass(frozen=True)
class TernaryTree:
    """Immutable ternary tree; children is None for a leaf."""

    children: Optional[tuple["TernaryTree", "TernaryTree", "TernaryTree"]] = None

    @property
    def is_leaf(self) -> bool:
        return self.children is None

    @property
    def generation(self) -> int:
        if self.children is None:
            return 0
        return 1 + sum(c.generation for c in self.children)

    @property
    def leaf_count(self) -> int:
        return 2 * self.generation + 1

    def to_text(self) -> str:
        """Textual form: '•' for a leaf, '(T1 T2 T3)' for an internal node."""
        if self.children is None:
            return "•"
        return "(" + " ".join(c.to_text() for c in self.children) + ")"


LEAF = TernaryTree()


def node(c1: TernaryTree, c2: TernaryTree, c3: TernaryTree) -> TernaryTree:
    return TernaryTree((c1, c2, c3))


def compositions(total: int) -> Iterator[tuple[int, int, int]]:
    """All (j1, j2, j3) with j_i >= 0 summing to total, lexicographically."""
    for j1 in range(total + 1):
        for j2 in range(total - j1 + 1):
            yield j1, j2, total - j1 - j2


@lru_cache(maxsize=None)
def count_trees(j: int) -> int:
    """#T(j): 1, 1, 3, 12, 55, 273, ... (each internal node spawns 3 subtrees)."""
    if j < 0:
        raise ValueError("generation must be nonnegative")
    if j == 0:
        return 1
    return sum(
        count_trees(j1) * count_trees(j2) * count_trees(j3)
        for j1, j2, j3 in compositions(j - 1)
    )


@lru_cache(maxsize=None)
def enumerate_trees(j: int) -> tuple[TernaryTree, ...]:
    """All generation-j trees in canonical order.

    Order: lexicographic on the triple of child generations, then recursively
    on the children. Capped at generation ENUM_CAP to bound memory.
    """
    if j < 0:
        raise ValueError("generation must be nonnegative")
    if j > ENUM_CAP:
        raise EnumerationCapError(
            f"tree enumeration capped at generation {ENUM_CAP}, got {j}"
        )
    if j == 0:
        return (LEAF,)
    out: list[TernaryTree] = []
    for j1, j2, j3 in compositions(j - 1):
        for c1 in enumerate_trees(j1):
            for c2 in enumerate_trees(j2):
                for c3 in enumerate_trees(j3):
                    out.append(node(c1, c2, c3))
    return tuple(out)


def growth_bound_ratio(j: int) -> float:
    """#T(j) * (1+j)^2 / C0^j; the counting bound says this is <= 1."""
    return count_trees(j) * (1 + j) ** 2 / C0**j


def leaf_conjugation_flags(tree: TernaryTree) -> tuple[int, ...]:
    """Conjugation parity of each leaf in left-to-right order.

    A leaf is effectively conjugated iff it sits under an odd number of
    middle-child edges (the conjugated slot of each trilinear node).
    """
    flags: list[int] = []

    def walk(t: TernaryTree, parity: int) -> None:
        if t.children is None:
            flags.append(parity)
            return
        c1, c2, c3 = t.children
        walk(c1, parity)
        walk(c2, parity ^ 1)
        walk(c3, parity)

    walk(tree, 0)
    return tuple(flags)
