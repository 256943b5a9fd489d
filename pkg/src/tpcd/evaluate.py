"""Structural precision/recall metrics and the conflicting-edge proportion.

Adjacencies, v-structures and ancestral relations are scored against the
true DAG; possible-ancestral relations are scored against the reference
graph that encodes the same background knowledge as the estimate.  A
precision or recall with an empty denominator is recorded as None and
excluded from cross-replication means.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import Dag, MixedGraph

__all__ = ["FeatureScore", "EvalReport", "score"]


@dataclass(frozen=True)
class FeatureScore:
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float | None:
        d = self.tp + self.fp
        return self.tp / d if d else None

    @property
    def recall(self) -> float | None:
        d = self.tp + self.fn
        return self.tp / d if d else None

    @property
    def f1(self) -> float | None:
        d = 2 * self.tp + self.fp + self.fn
        return 2 * self.tp / d if d else None

    def to_dict(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }


@dataclass(frozen=True)
class EvalReport:
    adjacency: FeatureScore
    v_structure: FeatureScore
    ancestor: FeatureScore
    possible_ancestor: FeatureScore
    conflict_proportion: float
    bidirected_edge_ratio: float
    n_tests_by_round: dict[str, list[int]] | None = None
    n_tests_total: int | None = None

    def to_dict(self) -> dict:
        return {
            "adjacency": self.adjacency.to_dict(),
            "v_structure": self.v_structure.to_dict(),
            "ancestor": self.ancestor.to_dict(),
            "possible_ancestor": self.possible_ancestor.to_dict(),
            "conflict_proportion": self.conflict_proportion,
            "bidirected_edge_ratio": self.bidirected_edge_ratio,
            "n_tests_by_round": self.n_tests_by_round,
            "n_tests_total": self.n_tests_total,
        }


def _feature(est: set, truth: set) -> FeatureScore:
    tp = len(est & truth)
    return FeatureScore(tp=tp, fp=len(est) - tp, fn=len(truth) - tp)


def _ancestor_pairs(g: MixedGraph) -> set[tuple[int, int]]:
    return {(u, v) for v in range(g.p) for u in g.ancestors(v)}


def _possible_ancestor_pairs(g: MixedGraph) -> set[tuple[int, int]]:
    return {(u, v) for v in range(g.p) for u in g.possible_ancestors(v)}


def _conflict_proportion(g: MixedGraph) -> float:
    incident = {v for i, j in g.bidirected_edges() for v in (i, j)}
    if not incident:
        return 0.0
    return len(incident) / g.n_edges


def score(estimated: MixedGraph, truth_dag: Dag, truth_possible_ref: MixedGraph) -> EvalReport:
    """Score an estimate against the truth DAG and the possible-ancestor reference."""
    if not (estimated.p == truth_dag.p == truth_possible_ref.p):
        raise ValueError("graphs must share the node count")
    n_edges = estimated.n_edges
    n_bidir = len(estimated.bidirected_edges())
    return EvalReport(
        adjacency=_feature(set(estimated.edge_pairs()), set(truth_dag.edge_pairs())),
        v_structure=_feature(estimated.v_structures(), truth_dag.v_structures()),
        ancestor=_feature(_ancestor_pairs(estimated), _ancestor_pairs(truth_dag)),
        possible_ancestor=_feature(
            _possible_ancestor_pairs(estimated),
            _possible_ancestor_pairs(truth_possible_ref),
        ),
        conflict_proportion=_conflict_proportion(estimated),
        bidirected_edge_ratio=(n_bidir / n_edges) if n_edges else 0.0,
    )
