"""The discovery algorithm family.

Phases, in order: a stable skeleton search with tier-restricted candidate
separating sets, a majority-rule collider phase that only traverses triples
whose center sits in the latest tier of its endpoints, orientation of every
cross-tier edge, and a Meek closure (rule 4 joins in whenever more than one
tier is present).  The same machinery yields four variants:

``tpc_stable``
    full tier-aware, order-independent pipeline.
``pc_stable``
    the same pipeline on a single tier (rules 1-3 only).
``pc_basic``
    the classic order-dependent algorithm, kept for comparison runs.
``naive_tpc``
    tiers imposed post hoc on a ``pc_stable`` output, then re-closed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .citest import CiBackend
from .graph import MixedGraph
from .meek import meek_closure, rule_matches
from .tiers import TieredOrdering

__all__ = [
    "DiscoveryConfig",
    "DiscoveryState",
    "skeleton_phase",
    "vstructure_phase",
    "cross_tier_phase",
    "meek_phase",
    "impose_cross_tier",
    "run",
    "run_state",
    "naive_tpc",
]

VARIANTS = ("tpc_stable", "pc_stable", "pc_basic", "naive_tpc")


@dataclass
class DiscoveryConfig:
    alpha: float = 0.01
    variant: str = "tpc_stable"
    max_cond_size: int | None = None
    order_seed: int | None = None  # pc_basic only

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must be in (0, 1)")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")


@dataclass
class DiscoveryState:
    """Intermediate products of a run."""

    graph: MixedGraph
    ambiguous: list[tuple[int, int]] = field(default_factory=list)
    orient_list: list[tuple[int, int]] = field(default_factory=list)
    test_log: dict[str, list[int]] | None = None
    sepset_cache: dict[tuple[int, int], list[tuple[int, ...]]] = field(default_factory=dict)


def _set_phase(ci: CiBackend, phase: str) -> None:
    hook = getattr(ci, "set_phase", None)
    if hook is not None:
        hook(phase)


def _snapshot_log(ci: CiBackend) -> dict[str, list[int]] | None:
    hook = getattr(ci, "snapshot", None)
    return hook() if hook is not None else None


def skeleton_phase(
    p: int,
    tau: TieredOrdering,
    ci: CiBackend,
    max_cond_size: int | None = None,
) -> DiscoveryState:
    """Stable skeleton search over candidate sets in the same or earlier tiers.

    Starts from the complete undirected graph.  At each level l the
    candidate sets s(i) are snapshotted, then every ordered adjacent pair
    (i, j) with enough candidates is tested against all subsets of
    s(i) - {j} of size l; the edge is removed on the first independence.
    Removals take effect immediately, but the snapshots keep the result
    independent of the visiting order.
    """
    if tau.p != p:
        raise ValueError("ordering does not cover all nodes")
    g = MixedGraph.complete_undirected(p)
    state = DiscoveryState(graph=g)
    _set_phase(ci, "skeleton")
    level = -1
    while True:
        level += 1
        if max_cond_size is not None and level > max_cond_size:
            break
        snap = [
            [v for v in g.adjacent(i) if tau[v] <= tau[i]]
            for i in range(p)
        ]
        any_qualified = False
        for i in range(p):
            for j in range(p):
                if i == j or not g.has_edge(i, j):
                    continue
                cand = [v for v in snap[i] if v != j]
                if len(cand) < level:
                    continue
                any_qualified = True
                for sub in combinations(cand, level):
                    if ci.independent(i, j, sub):
                        g.remove_edge(i, j)
                        key = (min(i, j), max(i, j))
                        state.sepset_cache.setdefault(key, []).append(sub)
                        break
        if not any_qualified:
            break
    state.test_log = _snapshot_log(ci)
    return state


def _tier_restricted_adjacency(g: MixedGraph, tau: TieredOrdering, i: int) -> list[int]:
    return [v for v in g.adjacent(i) if tau[v] <= tau[i]]


def _subset_pool(s_i, s_k, max_cond_size):
    pool = set()
    for base in (s_i, s_k):
        top = len(base) if max_cond_size is None else min(len(base), max_cond_size)
        for size in range(top + 1):
            pool.update(combinations(base, size))
    return sorted(pool, key=lambda t: (len(t), t))


def vstructure_phase(
    state: DiscoveryState,
    tau: TieredOrdering,
    ci: CiBackend,
    max_cond_size: int | None = None,
) -> DiscoveryState:
    """Majority-rule collider orientation over tier-admissible triples.

    Only unshielded triples whose center lies in the latest tier of its two
    endpoints are traversed; triples with a strictly later center need no
    test because the cross-tier phase orients them anyway.  For each triple
    the counter goes up for every separating set missing the center and
    down for every one containing it; a positive count orients the
    collider, zero lists both edges as ambiguous, negative does nothing.
    Orientations are committed after the full traversal.
    """
    g = state.graph
    _set_phase(ci, "vstructure")
    triples = []
    for j in range(g.p):
        nbrs = sorted(v for v in g.adjacent(j) if g.is_undirected(v, j))
        for a, c in combinations(nbrs, 2):
            if g.has_edge(a, c):
                continue
            if max(tau[a], tau[c]) == tau[j]:
                triples.append((a, j, c))
    for a, j, c in triples:
        s_a = _tier_restricted_adjacency(g, tau, a)
        s_c = _tier_restricted_adjacency(g, tau, c)
        counter = 0
        for sub in _subset_pool(s_a, s_c, max_cond_size):
            if ci.independent(a, c, sub):
                counter += -1 if j in sub else 1
        if counter == 0:
            state.ambiguous.extend([(a, j), (c, j)])
        elif counter > 0:
            state.orient_list.extend([(a, j), (c, j)])
    for m, n in state.orient_list:
        if g.is_undirected(m, n):
            g.set_directed(m, n)
        elif g.is_directed(n, m):
            g.set_bidirected(m, n)
    state.test_log = _snapshot_log(ci)
    return state


def cross_tier_phase(state: DiscoveryState, tau: TieredOrdering) -> DiscoveryState:
    """Orient every undirected edge that spans tiers; other marks untouched."""
    g = state.graph
    for i, j in g.undirected_edges():
        if tau[i] < tau[j]:
            g.set_directed(i, j)
        elif tau[j] < tau[i]:
            g.set_directed(j, i)
    return state


def meek_phase(state: DiscoveryState, use_rule4: bool) -> DiscoveryState:
    state.graph = meek_closure(state.graph, state.ambiguous, use_rule4)
    return state


def impose_cross_tier(g: MixedGraph, tau: TieredOrdering) -> MixedGraph:
    """Force every cross-tier edge, whatever its mark, into the tier direction.

    This is the post-hoc step of the naive variant: directed edges against
    the ordering are reversed and bidirected cross-tier edges overwritten.
    """
    h = g.copy()
    for a, b in h.edge_pairs():
        i, j = (a, b) if tau[a] < tau[b] else (b, a)
        if tau[i] < tau[j]:
            h.set_directed(i, j)
    return h


def naive_tpc(p: int, tau: TieredOrdering, ci: CiBackend,
              max_cond_size: int | None = None) -> MixedGraph:
    """Tiers imposed post hoc: plain stable run, forced cross-tier edges, re-closure."""
    return naive_state(p, tau, ci, max_cond_size).graph


def naive_state(p: int, tau: TieredOrdering, ci: CiBackend,
                max_cond_size: int | None = None) -> DiscoveryState:
    base = _stable_state(p, TieredOrdering.single_tier(p), ci, max_cond_size, use_rule4=False)
    return naive_from_base(base, tau)


def naive_from_base(base: DiscoveryState, tau: TieredOrdering) -> DiscoveryState:
    """Apply the post-hoc steps to an already computed single-tier result."""
    state = DiscoveryState(
        graph=impose_cross_tier(base.graph, tau),
        ambiguous=list(base.ambiguous),
        orient_list=list(base.orient_list),
        test_log=base.test_log,
        sepset_cache=dict(base.sepset_cache),
    )
    state.graph = meek_closure(state.graph, state.ambiguous, use_rule4=True)
    return state


def _stable_state(p, tau, ci, max_cond_size, use_rule4) -> DiscoveryState:
    state = skeleton_phase(p, tau, ci, max_cond_size)
    state = vstructure_phase(state, tau, ci, max_cond_size)
    state = cross_tier_phase(state, tau)
    return meek_phase(state, use_rule4)


def _basic_state(p, tau, ci, max_cond_size, order_seed, use_rule4) -> DiscoveryState:
    # order-dependent variant: fresh adjacency sets, immediate edge handling
    rng = np.random.default_rng(order_seed)
    order = [int(v) for v in rng.permutation(p)] if order_seed is not None else list(range(p))
    g = MixedGraph.complete_undirected(p)
    state = DiscoveryState(graph=g)
    _set_phase(ci, "skeleton")
    level = -1
    while True:
        level += 1
        if max_cond_size is not None and level > max_cond_size:
            break
        any_qualified = False
        for i in order:
            for j in order:
                if i == j or not g.has_edge(i, j):
                    continue
                cand = [v for v in order if v != j and g.has_edge(i, v) and tau[v] <= tau[i]]
                if len(cand) < level:
                    continue
                any_qualified = True
                for sub in combinations(cand, level):
                    if ci.independent(i, j, sub):
                        g.remove_edge(i, j)
                        state.sepset_cache.setdefault((min(i, j), max(i, j)), []).append(sub)
                        break
        if not any_qualified:
            break
    _set_phase(ci, "vstructure")
    for j in order:
        for a, c in combinations(sorted(g.adjacent(j)), 2):
            if g.has_edge(a, c):
                continue
            if max(tau[a], tau[c]) != tau[j]:
                continue
            if not ci.independent(a, c, (j,)):
                # classic behaviour: freshly found colliders overwrite
                g.set_directed(a, j)
                g.set_directed(c, j)
    state = cross_tier_phase(state, tau)
    # immediate (order-dependent) rule application
    rules = (1, 2, 3, 4) if use_rule4 else (1, 2, 3)
    changed = True
    while changed:
        changed = False
        for rule in rules:
            for m, n in rule_matches(g, rule):
                if g.is_undirected(m, n):
                    g.set_directed(m, n)
                    changed = True
    state.test_log = _snapshot_log(ci)
    return state


def run_state(config: DiscoveryConfig, p: int, tau: TieredOrdering, ci: CiBackend) -> DiscoveryState:
    """Run the configured variant and keep the intermediate products."""
    if tau.p != p:
        raise ValueError("ordering does not cover all nodes")
    if config.variant == "tpc_stable":
        return _stable_state(p, tau, ci, config.max_cond_size, use_rule4=tau.n_tiers > 1)
    if config.variant == "pc_stable":
        return _stable_state(p, TieredOrdering.single_tier(p), ci, config.max_cond_size,
                             use_rule4=False)
    if config.variant == "pc_basic":
        return _basic_state(p, tau, ci, config.max_cond_size, config.order_seed,
                            use_rule4=tau.n_tiers > 1)
    if config.variant == "naive_tpc":
        return naive_state(p, tau, ci, config.max_cond_size)
    raise ValueError(f"unknown variant {config.variant!r}")


def run(config: DiscoveryConfig, p: int, tau: TieredOrdering, ci: CiBackend) -> MixedGraph:
    """Run the configured variant and return the estimated graph."""
    return run_state(config, p, tau, ci).graph
