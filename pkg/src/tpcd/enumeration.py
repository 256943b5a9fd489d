"""Brute-force reference machinery for small node counts.

Everything here trades time for certainty: DAGs are enumerated outright,
equivalence classes are materialized by orienting skeleton edges in every
possible way, and reference graphs can be built both by orientation rules
and by unioning orientations over class members so the two constructions
can be checked against each other.  Enumeration entry points are guarded
at p <= 6.
"""

from __future__ import annotations

from itertools import combinations, product
from typing import Iterator

from .graph import Dag, MixedGraph
from .meek import meek_closure
from .tiers import TieredOrdering

__all__ = [
    "EnumerationLimitError",
    "enumerate_dags",
    "class_members",
    "reference_cpdag",
    "reference_tiered_mpdag",
    "class_size",
    "extendable",
    "d_separated_by_paths",
]

MAX_ENUM_P = 6


class EnumerationLimitError(ValueError):
    """Raised when an enumeration is requested beyond the guarded node count."""


def _guard(p: int) -> None:
    if p > MAX_ENUM_P:
        raise EnumerationLimitError(f"enumeration guarded at p <= {MAX_ENUM_P}, got {p}")


def enumerate_dags(p: int) -> Iterator[Dag]:
    """Yield every labeled DAG on ``p`` nodes exactly once."""
    _guard(p)
    if p == 0:
        return
    pairs = list(combinations(range(p), 2))
    # per pair: 0 none, 1 forward (i->j), 2 backward (j->i)
    for states in product((0, 1, 2), repeat=len(pairs)):
        d = Dag.__new__(Dag)
        MixedGraph.__init__(d, p)
        ok = True
        for (i, j), st in zip(pairs, states):
            if st == 1:
                d.set_directed(i, j)
            elif st == 2:
                d.set_directed(j, i)
        if d.is_acyclic():
            yield d


def _encodes(d: Dag, tau: TieredOrdering) -> bool:
    return all(tau[i] <= tau[j] for i, j in d.directed_edges())


def class_members(d: Dag, tau: TieredOrdering | None = None) -> list[Dag]:
    """All DAGs Markov equivalent to ``d`` (optionally also encoding ``tau``)."""
    _guard(d.p)
    return _represented_set(d.skeleton(), d.v_structures(), [], tau, d.p)


def _represented_set(
    skel: MixedGraph,
    vstructs: set,
    fixed_directed: list[tuple[int, int]],
    tau: TieredOrdering | None,
    p: int,
) -> list[Dag]:
    fixed = {(min(a, b), max(a, b)) for a, b in fixed_directed}
    free = [e for e in skel.edge_pairs() if e not in fixed]
    members = []
    for states in product((0, 1), repeat=len(free)):
        d = Dag.__new__(Dag)
        MixedGraph.__init__(d, p)
        for i, j in fixed_directed:
            d.set_directed(i, j)
        for (i, j), st in zip(free, states):
            if st == 0:
                d.set_directed(i, j)
            else:
                d.set_directed(j, i)
        if not d.is_acyclic():
            continue
        if d.v_structures() != vstructs:
            continue
        if tau is not None and not _encodes(d, tau):
            continue
        members.append(d)
    return members


def _orientation_union(members: list[Dag], skel: MixedGraph) -> MixedGraph:
    g = skel.copy()
    for i, j in skel.edge_pairs():
        forward = any(m.is_directed(i, j) for m in members)
        backward = any(m.is_directed(j, i) for m in members)
        if forward and not backward:
            g.set_directed(i, j)
        elif backward and not forward:
            g.set_directed(j, i)
    return g


def reference_cpdag(d: Dag, mode: str = "rule") -> MixedGraph:
    """The graph representing the equivalence class of ``d``.

    ``rule`` mode orients the v-structures on the skeleton and closes under
    rules 1-3 (any p); ``enum`` mode unions the orientations of every class
    member (p <= 6).  The two constructions must agree.
    """
    if mode == "rule":
        g = d.skeleton()
        for a, b, c in d.v_structures():
            g.set_directed(a, b)
            g.set_directed(c, b)
        return meek_closure(g, use_rule4=False)
    if mode == "enum":
        members = class_members(d)
        return _orientation_union(members, d.skeleton())
    raise ValueError(f"mode must be 'rule' or 'enum', got {mode!r}")


def reference_tiered_mpdag(d: Dag, tau: TieredOrdering, mode: str = "rule") -> MixedGraph:
    """The graph representing the class of ``d`` restricted by ``tau``.

    Requires ``d`` itself to encode the ordering (no edge against it).
    """
    if not _encodes(d, tau):
        raise ValueError("the DAG does not encode the tiered ordering")
    if mode == "rule":
        g = reference_cpdag(d, mode="rule")
        for i, j in g.undirected_edges():
            if tau[i] < tau[j]:
                g.set_directed(i, j)
            elif tau[j] < tau[i]:
                g.set_directed(j, i)
        return meek_closure(g, use_rule4=True)
    if mode == "enum":
        members = class_members(d, tau)
        return _orientation_union(members, d.skeleton())
    raise ValueError(f"mode must be 'rule' or 'enum', got {mode!r}")


def _graph_members(g: MixedGraph, tau: TieredOrdering | None) -> list[Dag]:
    # the set represented by a partially directed graph: same skeleton,
    # all its directed edges, identical v-structures (plus tau-encoding)
    _guard(g.p)
    if g.bidirected_edges():
        return []
    return _represented_set(g.skeleton(), g.v_structures(), g.directed_edges(), tau, g.p)


def class_size(g: MixedGraph, tau: TieredOrdering | None = None) -> int:
    """Number of DAGs in the (restricted) class represented by ``g``."""
    return len(_graph_members(g, tau))


def extendable(g: MixedGraph, tau: TieredOrdering | None = None) -> bool:
    """True iff some DAG represented by ``g`` encodes the ordering."""
    return class_size(g, tau) > 0


def _simple_paths(d: Dag, i: int, j: int) -> Iterator[list[int]]:
    path = [i]
    on_path = {i}

    def extend(v: int):
        for u in d.adjacent(v):
            if u == j:
                yield path + [u]
            elif u not in on_path:
                path.append(u)
                on_path.add(u)
                yield from extend(u)
                path.pop()
                on_path.remove(u)

    yield from extend(i)


def d_separated_by_paths(d: Dag, i: int, j: int, s) -> bool:
    """Literal d-separation check: enumerate every path, apply the blocking clauses.

    Exponential; exists purely to cross-validate the reachability version.
    """
    s = frozenset(int(v) for v in s)
    for path in _simple_paths(d, i, j):
        blocked = False
        for k in range(1, len(path) - 1):
            prev, v, nxt = path[k - 1], path[k], path[k + 1]
            collider = d.is_directed(prev, v) and d.is_directed(nxt, v)
            if collider:
                if v not in s and not (d.descendants(v) & s):
                    blocked = True
                    break
            elif v in s:
                blocked = True
                break
        if not blocked:
            return False
    return True
