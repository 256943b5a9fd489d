"""Orientation closure: Meek's rules 1-4 with list-then-commit batches.

Each pass collects, per rule and in a fixed rule order, all undirected
non-exempt edges whose induced-subgraph pattern matches, then commits the
whole batch: an undirected ``m - n`` becomes ``m -> n``; if the opposing
arrow ``m <- n`` is already present the edge becomes bidirected, encoding
the conflict instead of raising.  Batching makes the closure independent
of the order in which edges are inspected.
"""

from __future__ import annotations

from typing import Iterable

from .graph import MixedGraph

__all__ = ["rule_matches", "meek_closure"]


def _fires_rule1(g: MixedGraph, i: int, j: int) -> bool:
    # some k -> i with k not adjacent to j
    return any(not g.has_edge(k, j) for k in g.parents(i))


def _fires_rule2(g: MixedGraph, i: int, j: int) -> bool:
    # directed chain i -> k -> j
    return any(g.is_directed(k, j) for k in g.children(i))


def _fires_rule3(g: MixedGraph, i: int, j: int) -> bool:
    # k - i, m - i, k -> j, m -> j with k, m non-adjacent
    candidates = [k for k in g.parents(j) if g.is_undirected(k, i)]
    for a in range(len(candidates)):
        for b in range(a + 1, len(candidates)):
            if not g.has_edge(candidates[a], candidates[b]):
                return True
    return False


def _fires_rule4(g: MixedGraph, i: int, j: int) -> bool:
    # chain k -> m -> j with k - i, m - i undirected and j not adjacent to k
    for m in g.parents(j):
        if not g.is_undirected(m, i):
            continue
        for k in g.parents(m):
            if g.is_undirected(k, i) and not g.has_edge(j, k):
                return True
    return False


_RULES = {1: _fires_rule1, 2: _fires_rule2, 3: _fires_rule3, 4: _fires_rule4}


def _exempt(ambiguous: frozenset, i: int, j: int) -> bool:
    # exemption is per undirected edge, whichever order it was listed in
    return (i, j) in ambiguous or (j, i) in ambiguous


def rule_matches(
    g: MixedGraph,
    rule: int,
    ambiguous: Iterable[tuple[int, int]] = (),
) -> list[tuple[int, int]]:
    """Ordered pairs ``(i, j)`` with ``i - j`` undirected matching the rule pattern."""
    if rule not in _RULES:
        raise ValueError(f"rule must be one of 1..4, got {rule}")
    fires = _RULES[rule]
    amb = frozenset(ambiguous)
    out = []
    for i in range(g.p):
        for j in g.undirected_neighbors(i):
            if _exempt(amb, i, j):
                continue
            if fires(g, i, j):
                out.append((i, j))
    return out


def meek_closure(
    g: MixedGraph,
    ambiguous: Iterable[tuple[int, int]] = (),
    use_rule4: bool = False,
) -> MixedGraph:
    """Apply rules 1-3 (optionally 4) in batches until a full pass changes nothing."""
    h = g.copy()
    amb = frozenset(ambiguous)
    rules = (1, 2, 3, 4) if use_rule4 else (1, 2, 3)
    while True:
        changed = False
        for rule in rules:
            for m, n in rule_matches(h, rule, amb):
                if h.is_undirected(m, n):
                    h.set_directed(m, n)
                    changed = True
                elif h.is_directed(n, m):
                    h.set_bidirected(m, n)
                    changed = True
        if not changed:
            return h
