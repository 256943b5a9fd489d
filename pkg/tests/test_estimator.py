import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from tpcd.estimator import TieredPC
from tpcd.simulate import gen_dag, gen_sem, sample_data


def _chain_data(n=3000, seed=7):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(n)
    b = 0.8 * a + rng.standard_normal(n)
    c = 0.8 * b + rng.standard_normal(n)
    return np.column_stack([a, b, c])


def test_fit_orients_chain_with_tiers():
    est = TieredPC(alpha=0.01, tiers=[1, 2, 3]).fit(_chain_data())
    assert sorted(est.graph_.directed_edges()) == [(0, 1), (1, 2)]
    assert est.n_tests_ == sum(sum(v) for v in est.test_counts_.values())


def test_fit_without_tiers_leaves_chain_undirected():
    est = TieredPC(alpha=0.01).fit(_chain_data())
    assert est.graph_.undirected_edges() == [(0, 1), (1, 2)]


def test_get_params_round_trip_and_clone():
    est = TieredPC(alpha=0.05, variant="pc_stable", tiers=[1, 1, 2])
    params = est.get_params()
    assert params["alpha"] == 0.05 and params["variant"] == "pc_stable"
    cloned = clone(est)
    assert cloned.get_params() == params
    est.set_params(alpha=0.2)
    assert est.alpha == 0.2


def test_unfitted_access_raises():
    with pytest.raises(NotFittedError):
        TieredPC().get_graph()


def test_input_validation():
    with pytest.raises(ValueError):
        TieredPC().fit(np.array([[np.nan, 1.0], [0.0, 1.0], [1.0, 2.0], [2.0, 0.0]]))
    with pytest.raises(ValueError):
        TieredPC(tiers=[1, 2]).fit(_chain_data())  # tier length mismatch


def test_feature_names_become_labels():
    pd = pytest.importorskip("pandas")
    frame = pd.DataFrame(_chain_data(), columns=["early", "mid", "late"])
    est = TieredPC(alpha=0.01, tiers=[1, 2, 3]).fit(frame)
    assert est.graph_.labels == ("early", "mid", "late")


def test_variants_run_through_estimator():
    rng = np.random.default_rng(12)
    dag = gen_dag(6, 0.4, rng)
    data = sample_data(gen_sem(dag, rng), 500, rng)
    for variant in ("tpc_stable", "pc_stable", "pc_basic", "naive_tpc"):
        est = TieredPC(alpha=0.05, variant=variant, tiers=[1, 1, 2, 2, 3, 3])
        est.fit(data.values)
        assert est.graph_.p == 6
