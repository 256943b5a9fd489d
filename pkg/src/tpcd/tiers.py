"""Tiered orderings and the background knowledge they induce.

A tiered ordering assigns every node to exactly one tier; edges from a
later tier into an earlier one are forbidden.  Orderings are normalized to
dense tier numbers ``1..T`` on construction so that arbitrary integer tier
labels in input files compare consistently.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .graph import MixedGraph

__all__ = [
    "TieredOrdering",
    "BackgroundKnowledge",
    "TierFileError",
    "forbidden_edges",
    "is_cross_tier",
    "compare_orderings",
    "violates_tiers",
    "parse_tier_file",
]


class TierFileError(ValueError):
    """Raised when a tier file cannot be matched against the node labels."""


class TieredOrdering:
    """Map from node index to tier, normalized to consecutive tiers 1..T."""

    __slots__ = ("tiers",)

    def __init__(self, tiers: Sequence[int]):
        raw = [int(t) for t in tiers]
        if not raw:
            raise ValueError("ordering needs at least one node")
        distinct = sorted(set(raw))
        dense = {t: k + 1 for k, t in enumerate(distinct)}
        self.tiers = tuple(dense[t] for t in raw)

    @classmethod
    def single_tier(cls, p: int) -> "TieredOrdering":
        return cls([1] * p)

    @property
    def p(self) -> int:
        return len(self.tiers)

    @property
    def n_tiers(self) -> int:
        return max(self.tiers)

    def __getitem__(self, i: int) -> int:
        return self.tiers[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, TieredOrdering):
            return NotImplemented
        return self.tiers == other.tiers

    def __hash__(self):
        return hash(self.tiers)

    def __repr__(self) -> str:
        return f"TieredOrdering({list(self.tiers)})"

    def permute(self, perm: Sequence[int]) -> "TieredOrdering":
        """Ordering for nodes renamed by ``perm`` (node k becomes perm[k])."""
        out = [0] * self.p
        for k, target in enumerate(perm):
            out[target] = self.tiers[k]
        return TieredOrdering(out)


@dataclass(frozen=True)
class BackgroundKnowledge:
    """Required and forbidden directed edges; tiered knowledge never requires edges."""

    required: frozenset[tuple[int, int]] = field(default_factory=frozenset)
    forbidden: frozenset[tuple[int, int]] = field(default_factory=frozenset)


def forbidden_edges(tau: TieredOrdering) -> BackgroundKnowledge:
    """Knowledge induced by ``tau``: ``(j, i)`` is forbidden whenever tier(i) < tier(j).

    The pair ``(j, i)`` encodes the directed edge ``j -> i``.
    """
    forb = frozenset(
        (j, i)
        for i in range(tau.p)
        for j in range(tau.p)
        if tau[i] < tau[j]
    )
    return BackgroundKnowledge(forbidden=forb)


def is_cross_tier(g: MixedGraph, tau: TieredOrdering, i: int, j: int) -> bool:
    """True iff the adjacent pair ``(i, j)`` spans two different tiers."""
    if not g.has_edge(i, j):
        raise ValueError(f"nodes {i} and {j} are not adjacent")
    return tau[i] != tau[j]


def _refines(t1: TieredOrdering, t2: TieredOrdering) -> bool:
    # every strict t2-precedence is preserved by t1
    for i in range(t1.p):
        for j in range(t1.p):
            if t2[i] < t2[j] and not t1[i] < t1[j]:
                return False
    return True


def compare_orderings(t1: TieredOrdering, t2: TieredOrdering) -> str:
    """Compare two orderings: ``finer``, ``coarser``, ``equal`` or ``incomparable``."""
    if t1.p != t2.p:
        raise ValueError("orderings must cover the same node set")
    if t1.tiers == t2.tiers:
        return "equal"
    if _refines(t1, t2):
        return "finer"
    if _refines(t2, t1):
        return "coarser"
    return "incomparable"


def violates_tiers(g: MixedGraph, tau: TieredOrdering) -> set[tuple[int, int]]:
    """Edges incompatible with ``tau``.

    Returns every directed edge ``j -> i`` with tier(i) < tier(j) and, for
    every bidirected edge spanning two tiers, the ordered pair pointing
    against the ordering (later node first).
    """
    bad: set[tuple[int, int]] = set()
    for a, b in g.edge_pairs():
        i, j = (a, b) if tau[a] < tau[b] else (b, a)
        if tau[i] == tau[j]:
            continue
        if g.is_directed(j, i) or g.is_bidirected(i, j):
            bad.add((j, i))
    return bad


def parse_tier_file(
    text: str,
    labels: Sequence[str],
    allow_missing: bool = False,
) -> TieredOrdering:
    """Parse ``label,tier`` lines against a node label table.

    Unknown labels are always an error.  Nodes absent from the file default
    to tier 1 only when ``allow_missing`` is set; otherwise they are an
    error too.  Tier numbers may be arbitrary integers; they are normalized
    afterwards.
    """
    index = {lab: k for k, lab in enumerate(labels)}
    if len(index) != len(labels):
        raise TierFileError("node labels are not unique")
    seen: dict[int, int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [s.strip() for s in line.split(",")]
        if len(parts) != 2:
            raise TierFileError(f"line {lineno}: expected 'label,tier'")
        lab, tier_s = parts
        if lab not in index:
            raise TierFileError(f"line {lineno}: unknown label {lab!r}")
        try:
            tier = int(tier_s)
        except ValueError as exc:
            raise TierFileError(f"line {lineno}: tier {tier_s!r} is not an integer") from exc
        node = index[lab]
        if node in seen:
            raise TierFileError(f"line {lineno}: duplicate assignment for {lab!r}")
        seen[node] = tier
    missing = [lab for lab, k in index.items() if k not in seen]
    if missing and not allow_missing:
        raise TierFileError(f"no tier assigned to: {', '.join(sorted(missing))}")
    for lab in missing:
        seen[index[lab]] = 1
    return TieredOrdering([seen[k] for k in range(len(labels))])
