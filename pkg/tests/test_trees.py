"""Ternary tree combinatorics."""

import math

import pytest

from nls_inflation_lab.trees import (
    C0,
    ENUM_CAP,
    LEAF,
    EnumerationCapError,
    TernaryTree,
    compositions,
    count_trees,
    enumerate_trees,
    growth_bound_ratio,
    leaf_conjugation_flags,
    node,
)


def brute_force_trees(j: int) -> list[TernaryTree]:
    """Independent enumeration: grow every tree by expanding one leaf at a
    time and deduplicate. Exponential, only usable for tiny j."""
    if j == 0:
        return [LEAF]
    seen: set[TernaryTree] = set()

    def expand_one_leaf(tree: TernaryTree) -> list[TernaryTree]:
        if tree.is_leaf:
            return [node(LEAF, LEAF, LEAF)]
        out = []
        c1, c2, c3 = tree.children
        for v1 in expand_one_leaf(c1):
            out.append(node(v1, c2, c3))
        for v2 in expand_one_leaf(c2):
            out.append(node(c1, v2, c3))
        for v3 in expand_one_leaf(c3):
            out.append(node(c1, c2, v3))
        return out

    frontier = [LEAF]
    for _ in range(j):
        nxt = []
        for t in frontier:
            nxt.extend(expand_one_leaf(t))
        frontier = nxt
    for t in frontier:
        seen.add(t)
    return sorted(seen, key=lambda t: t.to_text())


def test_counts_match_known_sequence():
    assert [count_trees(j) for j in range(6)] == [1, 1, 3, 12, 55, 273]


@pytest.mark.parametrize("j", range(6))
def test_enumeration_matches_count(j):
    trees = enumerate_trees(j)
    assert len(trees) == count_trees(j)
    assert len(set(trees)) == len(trees)
    assert all(t.generation == j for t in trees)


@pytest.mark.parametrize("j", range(5))
def test_enumeration_matches_brute_force(j):
    assert set(enumerate_trees(j)) == set(brute_force_trees(j))


def test_growth_bound_through_cap():
    for j in range(ENUM_CAP + 1):
        assert count_trees(j) * (1 + j) ** 2 <= C0**j + 1e-9
        assert growth_bound_ratio(j) <= 1.0 + 1e-12


def test_c0_value():
    assert C0 == pytest.approx(9.0 * (math.pi**2 / 6.0) ** 2)
    # equality at j = 0: a single tree against C0^0 = 1
    assert growth_bound_ratio(0) == 1.0


def test_leaf_count_invariant():
    for j in range(5):
        for t in enumerate_trees(j):
            assert t.leaf_count == 2 * j + 1


def test_text_form():
    assert LEAF.to_text() == "•"
    t1 = node(LEAF, LEAF, LEAF)
    assert t1.to_text() == "(• • •)"
    t2 = node(t1, LEAF, LEAF)
    assert t2.to_text() == "((• • •) • •)"


def test_text_forms_unique():
    texts = [t.to_text() for t in enumerate_trees(3)]
    assert len(set(texts)) == len(texts)


def test_conjugation_flags():
    assert leaf_conjugation_flags(LEAF) == (0,)
    t1 = node(LEAF, LEAF, LEAF)
    assert leaf_conjugation_flags(t1) == (0, 1, 0)
    # a leaf below two middle slots is conjugated twice, i.e. not at all
    t2 = node(LEAF, node(LEAF, t1, LEAF), LEAF)
    assert leaf_conjugation_flags(t2) == (0, 1, 0, 1, 0, 1, 0)


def test_conjugation_balance():
    # every generation-j tree has j conjugated and j+1 plain leaves
    for j in range(4):
        for t in enumerate_trees(j):
            flags = leaf_conjugation_flags(t)
            assert sum(flags) == j
            assert len(flags) - sum(flags) == j + 1


def test_enumeration_cap():
    with pytest.raises(EnumerationCapError):
        enumerate_trees(ENUM_CAP + 1)


def test_compositions_cover_recursion():
    parts = list(compositions(4))
    assert len(parts) == 15
    assert all(sum(p) == 4 for p in parts)
    assert parts == sorted(parts)
