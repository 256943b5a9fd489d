"""Shared fixtures: the worked-example graphs used across the suite.

Node indices for the 7-node cohort toy graph:
0 par.edu, 1 br.feed, 2 screen, 3 sleep, 4 well-being, 5 phys.act, 6 bmi.
Node indices for the two 4-node examples: 0 A, 1 B, 2 C, 3 D.
"""

import numpy as np
import pytest

from tpcd.graph import Dag, MixedGraph
from tpcd.tiers import TieredOrdering

COHORT_LABELS = ("par_edu", "br_feed", "screen", "sleep", "well_being", "phys_act", "bmi")
ABCD = ("A", "B", "C", "D")


@pytest.fixture
def cohort_dag():
    return Dag(7, [(0, 1), (0, 2), (1, 4), (2, 3), (3, 4), (2, 5), (5, 6)], labels=COHORT_LABELS)


@pytest.fixture
def cohort_tiers():
    # early life: par.edu, br.feed; childhood: screen, sleep, well-being; adolescence: rest
    return TieredOrdering([1, 1, 2, 2, 2, 3, 3])


@pytest.fixture
def cohort_cpdag():
    return MixedGraph.from_edges(
        7,
        directed=[(1, 4), (3, 4)],
        undirected=[(0, 1), (0, 2), (2, 3), (2, 5), (5, 6)],
        labels=COHORT_LABELS,
    )


@pytest.fixture
def cohort_mpdag():
    return MixedGraph.from_edges(
        7,
        directed=[(0, 2), (1, 4), (2, 3), (3, 4), (2, 5), (5, 6)],
        undirected=[(0, 1)],
        labels=COHORT_LABELS,
    )


@pytest.fixture
def collider_dag():
    # A->C, A->D, B->D, C->D; tier 1 = {A}, tier 2 = {B, C, D}
    return Dag(4, [(0, 2), (0, 3), (1, 3), (2, 3)], labels=ABCD)


@pytest.fixture
def collider_tiers():
    return TieredOrdering([1, 2, 2, 2])


@pytest.fixture
def collider_pdag_mid():
    # intermediate PDAG after the collider phase under the forced error
    return MixedGraph.from_edges(
        4, directed=[(1, 3), (2, 3)], undirected=[(0, 2), (0, 3)], labels=ABCD
    )


@pytest.fixture
def collider_full_dag_marks():
    # final output: the full DAG recovered once cross-tier edges are oriented
    return MixedGraph.from_edges(4, directed=[(0, 2), (0, 3), (1, 3), (2, 3)], labels=ABCD)


@pytest.fixture
def diamond_dag():
    # C->A, B->A, C->D, B->D, C->B; single independence A _||_ D | {B, C}
    return Dag(4, [(2, 0), (1, 0), (2, 3), (1, 3), (2, 1)], labels=ABCD)


@pytest.fixture
def diamond_tiers():
    return TieredOrdering([1, 1, 1, 2])


@pytest.fixture
def diamond_cpdag_wrong():
    # estimate under the forced error with no background knowledge
    return MixedGraph.from_edges(
        4, directed=[(2, 0), (1, 0)], undirected=[(1, 3), (2, 3)], labels=ABCD
    )


@pytest.fixture
def diamond_mpdag_tiered():
    # estimate under the forced error with the two-tier ordering
    return MixedGraph.from_edges(
        4, directed=[(1, 3), (2, 3)], undirected=[(0, 1), (0, 2), (1, 2)], labels=ABCD
    )


def random_consistent_tiers(p, rng, max_tiers=4):
    """Contiguous tier blocks over the generation order; always encoded by
    DAGs whose edges all point forward in that order."""
    t = int(rng.integers(1, max_tiers + 1))
    if t == 1 or p < 2:
        return TieredOrdering.single_tier(p)
    n_cuts = min(t - 1, p - 1)
    cuts = sorted(int(c) for c in rng.choice(np.arange(1, p), size=n_cuts, replace=False))
    tiers, tier = [], 1
    for v in range(p):
        while cuts and v >= cuts[0]:
            tier += 1
            cuts.pop(0)
        tiers.append(tier)
    return TieredOrdering(tiers)
