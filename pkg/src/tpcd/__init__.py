"""Constraint-based causal discovery with tiered background knowledge."""

from .citest import (
    CiBackend,
    CountingBackend,
    Dataset,
    GaussBackend,
    NoisyBackend,
    OracleBackend,
    SuffStat,
)
from .discovery import (
    DiscoveryConfig,
    DiscoveryState,
    cross_tier_phase,
    meek_phase,
    naive_tpc,
    run,
    run_state,
    skeleton_phase,
    vstructure_phase,
)
from .enumeration import (
    class_size,
    enumerate_dags,
    extendable,
    reference_cpdag,
    reference_tiered_mpdag,
)
from .estimator import TieredPC
from .evaluate import EvalReport, score
from .graph import Dag, MixedGraph, markov_equivalent
from .meek import meek_closure, rule_matches
from .simulate import SimConfig, assign_tiers, gen_dag, gen_sem, run_study, sample_data
from .tiers import (
    BackgroundKnowledge,
    TieredOrdering,
    compare_orderings,
    forbidden_edges,
    is_cross_tier,
    violates_tiers,
)

__version__ = "0.1.0"

__all__ = [
    "BackgroundKnowledge",
    "CiBackend",
    "CountingBackend",
    "Dag",
    "Dataset",
    "DiscoveryConfig",
    "DiscoveryState",
    "EvalReport",
    "GaussBackend",
    "MixedGraph",
    "NoisyBackend",
    "OracleBackend",
    "SimConfig",
    "SuffStat",
    "TieredOrdering",
    "TieredPC",
    "assign_tiers",
    "class_size",
    "compare_orderings",
    "cross_tier_phase",
    "enumerate_dags",
    "extendable",
    "forbidden_edges",
    "gen_dag",
    "gen_sem",
    "is_cross_tier",
    "markov_equivalent",
    "meek_closure",
    "meek_phase",
    "naive_tpc",
    "reference_cpdag",
    "reference_tiered_mpdag",
    "rule_matches",
    "run",
    "run_state",
    "run_study",
    "sample_data",
    "score",
    "skeleton_phase",
    "violates_tiers",
    "vstructure_phase",
]
