"""Scikit-learn style front end for the discovery algorithms."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted, validate_data

from .citest import CountingBackend, Dataset, GaussBackend, SuffStat
from .discovery import DiscoveryConfig, run_state
from .tiers import TieredOrdering

__all__ = ["TieredPC"]


class TieredPC(BaseEstimator):
    """Estimate a causal graph from data with optional tiered knowledge.

    Parameters
    ----------
    alpha : float, default=0.01
        Significance level of the partial-correlation tests.
    variant : str, default="tpc_stable"
        One of ``tpc_stable``, ``pc_stable``, ``pc_basic``, ``naive_tpc``.
    tiers : array-like of int of shape (n_features,), optional
        Tier number per column; ``None`` puts everything into one tier.
    max_cond_size : int, optional
        Cap on the conditioning-set size (default: uncapped).
    order_seed : int, optional
        Variable-order seed, only used by the ``pc_basic`` variant.

    Attributes
    ----------
    graph_ : MixedGraph
        The estimated graph, with column labels as node names.
    ambiguous_ : list of (int, int)
        Edge pairs whose collider status the majority rule could not decide.
    test_counts_ : dict
        Conditional-independence tests per phase, indexed by set size.

    Examples
    --------
    >>> import numpy as np
    >>> rng = np.random.default_rng(7)
    >>> a = rng.standard_normal(2000)
    >>> b = 0.8 * a + rng.standard_normal(2000)
    >>> c = 0.8 * b + rng.standard_normal(2000)
    >>> est = TieredPC(alpha=0.01, tiers=[1, 2, 3]).fit(np.column_stack([a, b, c]))
    >>> sorted(est.graph_.directed_edges())
    [(0, 1), (1, 2)]
    """

    def __init__(self, alpha=0.01, variant="tpc_stable", tiers=None,
                 max_cond_size=None, order_seed=None):
        self.alpha = alpha
        self.variant = variant
        self.tiers = tiers
        self.max_cond_size = max_cond_size
        self.order_seed = order_seed

    def fit(self, X, y=None):
        """Fit the graph on an (n_samples, n_features) matrix."""
        X = validate_data(self, X, dtype=float, ensure_min_samples=4, ensure_min_features=2)
        n, p = X.shape
        if self.tiers is None:
            tau = TieredOrdering.single_tier(p)
        else:
            tiers = np.asarray(self.tiers, dtype=int)
            if tiers.shape != (p,):
                raise ValueError(f"tiers must have one entry per feature ({p})")
            tau = TieredOrdering(tiers.tolist())
        config = DiscoveryConfig(
            alpha=self.alpha,
            variant=self.variant,
            max_cond_size=self.max_cond_size,
            order_seed=self.order_seed,
        )
        labels = getattr(self, "feature_names_in_", None)
        data = Dataset(X, tuple(labels) if labels is not None else tuple(f"X{i+1}" for i in range(p)))
        backend = CountingBackend(GaussBackend(SuffStat.from_dataset(data), self.alpha))
        state = run_state(config, p, tau, backend)
        state.graph.labels = data.labels
        self.graph_ = state.graph
        self.ambiguous_ = list(state.ambiguous)
        self.test_counts_ = backend.snapshot()
        self.n_tests_ = backend.total()
        return self

    def get_graph(self):
        """Return the fitted graph."""
        check_is_fitted(self)
        return self.graph_

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.target_tags.required = False
        return tags
