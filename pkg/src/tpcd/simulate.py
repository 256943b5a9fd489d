"""Study generator: random DAGs, linear-Gaussian data, tier schemes, sweeps.

Randomness is derived per replication from (master seed, rep index,
purpose tag) through a seed sequence, so replications are reproducible
independently of execution order and may run in parallel.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterator, Sequence

import numpy as np

from .citest import CountingBackend, Dataset, GaussBackend, SuffStat
from .discovery import DiscoveryConfig, naive_from_base, run_state, _stable_state
from .enumeration import reference_tiered_mpdag
from .evaluate import score
from .graph import Dag
from .tiers import TieredOrdering, violates_tiers

__all__ = [
    "SimConfig",
    "Sem",
    "gen_dag",
    "gen_sem",
    "sample_data",
    "assign_tiers",
    "run_study",
    "run_replication",
    "aggregate_records",
]

LEVELS = ("t1", "t2", "t5")
T2_FRACTIONS = {"t2a": 0.2, "t2b": 0.4, "t2c": 0.6, "t2d": 0.8}
_PURPOSE = {"dag": 0, "sem": 1, "data": 2, "tau2": 3}


@dataclass(frozen=True)
class SimConfig:
    p: int = 20
    density: float = 0.2
    n: int = 1000
    alpha: float = 0.01
    reps: int = 1
    seed: int = 0
    levels: tuple[str, ...] = LEVELS
    algorithm: str = "tpc_stable"
    max_cond_size: int | None = None

    def __post_init__(self):
        if self.reps < 1 or self.p < 1 or self.n < 1:
            raise ValueError("p, n and reps must be positive")
        if not 0 < self.density < 1:
            raise ValueError("density must be in (0, 1)")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must be in (0, 1)")
        if self.algorithm not in ("tpc_stable", "naive_tpc"):
            raise ValueError("algorithm must be 'tpc_stable' or 'naive_tpc'")
        for level in self.levels:
            if level not in LEVELS and level not in T2_FRACTIONS:
                raise ValueError(f"unknown knowledge level {level!r}")


@dataclass(frozen=True)
class Sem:
    """Linear-Gaussian structural model over a DAG."""

    dag: Dag
    coefficients: dict[tuple[int, int], float]
    noise_sd: np.ndarray


def _rep_rng(seed: int, rep: int, purpose: str) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(rep, _PURPOSE[purpose]))
    )


def gen_dag(p: int, prob: float, rng: np.random.Generator) -> Dag:
    """Random DAG: each forward pair i < j carries an edge with probability ``prob``."""
    if not 0 < prob < 1:
        raise ValueError("prob must be in (0, 1)")
    edges = []
    for i in range(p):
        for j in range(i + 1, p):
            if rng.random() < prob:
                edges.append((i, j))
    return Dag(p, edges)


def gen_sem(dag: Dag, rng: np.random.Generator) -> Sem:
    """Coefficients uniform on [-1,-0.1] or [0.1,1]; noise sd uniform on [0.5,1.25]."""
    coefficients = {}
    for i, j in sorted(dag.directed_edges()):
        mag = rng.uniform(0.1, 1.0)
        sign = 1.0 if rng.random() < 0.5 else -1.0
        coefficients[(i, j)] = sign * mag
    noise_sd = rng.uniform(0.5, 1.25, size=dag.p)
    return Sem(dag=dag, coefficients=coefficients, noise_sd=noise_sd)


def sample_data(sem: Sem, n: int, rng: np.random.Generator) -> Dataset:
    """Draw n observations, evaluating variables in topological order."""
    if n < 1:
        raise ValueError("n must be positive")
    p = sem.dag.p
    x = np.zeros((n, p))
    noise = rng.standard_normal((n, p)) * sem.noise_sd
    for j in sem.dag.topological_order():
        x[:, j] = noise[:, j]
        for i in sem.dag.parents(j):
            x[:, j] += sem.coefficients[(i, j)] * x[:, i]
    return Dataset(x, sem.dag.labels)


def assign_tiers(p: int, scheme: str, rng: np.random.Generator | None = None) -> TieredOrdering:
    """Tier assignment over the generation order 0..p-1.

    ``t1`` is a single tier, ``t5`` splits the order into five contiguous
    near-equal blocks, and ``t2`` puts the first ceil(q*p) nodes into tier 1
    with q drawn uniformly from {0.2, 0.4, 0.6, 0.8} (or fixed by naming the
    variant ``t2a``..``t2d``).  Blocks are contiguous in the generation
    order, so every scheme is correct knowledge for graphs from
    :func:`gen_dag`.
    """
    if scheme == "t1":
        return TieredOrdering.single_tier(p)
    if scheme == "t5":
        blocks = np.array_split(np.arange(p), 5)
        tiers = [0] * p
        for t, block in enumerate(blocks, start=1):
            for v in block:
                tiers[int(v)] = t
        return TieredOrdering(tiers)
    if scheme == "t2":
        if rng is None:
            raise ValueError("scheme 't2' draws a random variant and needs an rng")
        q = float(rng.choice(sorted(T2_FRACTIONS.values())))
    elif scheme in T2_FRACTIONS:
        q = T2_FRACTIONS[scheme]
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    cut = int(np.ceil(q * p))
    return TieredOrdering([1 if v < cut else 2 for v in range(p)])


def run_replication(config: SimConfig, rep: int) -> list[dict]:
    """All per-level records for one replication (shared DAG, SEM and data)."""
    dag = gen_dag(config.p, config.density, _rep_rng(config.seed, rep, "dag"))
    sem = gen_sem(dag, _rep_rng(config.seed, rep, "sem"))
    data = sample_data(sem, config.n, _rep_rng(config.seed, rep, "data"))
    suff = SuffStat.from_dataset(data)
    tau2_rng = _rep_rng(config.seed, rep, "tau2")
    q = float(tau2_rng.choice(sorted(T2_FRACTIONS.values())))
    records = []
    naive_base = None
    if config.algorithm == "naive_tpc":
        # step 1 ignores tiers, so it is shared across knowledge levels
        counting = CountingBackend(GaussBackend(suff, config.alpha))
        naive_base = _stable_state(
            config.p, TieredOrdering.single_tier(config.p), counting,
            config.max_cond_size, use_rule4=False,
        )
    for level in config.levels:
        if level == "t2":
            cut = int(np.ceil(q * config.p))
            tau = TieredOrdering([1 if v < cut else 2 for v in range(config.p)])
        else:
            tau = assign_tiers(config.p, level)
        if config.algorithm == "tpc_stable":
            counting = CountingBackend(GaussBackend(suff, config.alpha))
            cfg = DiscoveryConfig(alpha=config.alpha, variant="tpc_stable",
                                  max_cond_size=config.max_cond_size)
            state = run_state(cfg, config.p, tau, counting)
        else:
            state = naive_from_base(naive_base, tau)
        if violates_tiers(dag, tau):
            raise RuntimeError("generated tiering is not encoded by the generated DAG")
        truth_ref = reference_tiered_mpdag(dag, tau, mode="rule")
        report = replace(
            score(state.graph, dag, truth_ref),
            n_tests_by_round=state.test_log or {},
            n_tests_total=sum(sum(v) for v in (state.test_log or {}).values()),
        )
        records.append({"rep": rep, "level": level, **report.to_dict()})
    return records


def _worker(args) -> tuple[int, list[dict]]:
    config, rep = args
    try:
        return rep, run_replication(config, rep)
    except Exception as exc:  # a failed replication is recorded, never fatal
        return rep, [{"rep": rep, "level": None, "error": f"{type(exc).__name__}: {exc}"}]


def run_study(config: SimConfig, jobs: int = 1) -> Iterator[dict]:
    """Yield one record per (replication, knowledge level), in rep order."""
    tasks = [(config, rep) for rep in range(config.reps)]
    if jobs <= 1:
        for task in tasks:
            _, recs = _worker(task)
            yield from recs
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for _, recs in sorted(pool.map(_worker, tasks), key=lambda t: t[0]):
            yield from recs


_FEATURES = ("adjacency", "v_structure", "ancestor", "possible_ancestor")


def aggregate_records(records: Sequence[dict]) -> dict[str, dict[str, dict[str, float | int | None]]]:
    """Per-level means and standard errors; undefined values are excluded from means."""
    by_level: dict[str, list[dict]] = {}
    for rec in records:
        if "error" in rec:
            continue
        by_level.setdefault(rec["level"], []).append(rec)
    out: dict[str, dict] = {}
    for level, recs in by_level.items():
        agg: dict[str, dict] = {}
        for feat in _FEATURES:
            for metric in ("precision", "recall", "f1"):
                vals = [r[feat][metric] for r in recs if r[feat][metric] is not None]
                agg[f"{feat}_{metric}"] = _mean_se(vals)
        for metric in ("conflict_proportion", "bidirected_edge_ratio", "n_tests_total"):
            vals = [r[metric] for r in recs if r.get(metric) is not None]
            agg[metric] = _mean_se(vals)
        out[level] = agg
    return out


def _mean_se(vals: Sequence[float]) -> dict[str, float | int | None]:
    if not vals:
        return {"mean": None, "se": None, "count": 0}
    arr = np.asarray(vals, dtype=float)
    se = float(arr.std(ddof=1) / np.sqrt(len(arr))) if len(arr) > 1 else 0.0
    return {"mean": float(arr.mean()), "se": se, "count": len(arr)}
