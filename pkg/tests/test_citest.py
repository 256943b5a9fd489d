import numpy as np
import pytest
from scipy.stats import norm

from tpcd.citest import (
    CIDegeneracyError,
    CountingBackend,
    Dataset,
    DataFormatError,
    GaussBackend,
    NoisyBackend,
    OracleBackend,
    SuffStat,
    canonical_query,
)
from tpcd.discovery import DiscoveryConfig, run_state
from tpcd.graph import Dag
from tpcd.simulate import gen_dag, gen_sem, sample_data
from tpcd.tiers import TieredOrdering


def _residual_partial_corr(x, i, j, s):
    """Independent oracle: correlation of least-squares residuals."""
    if not s:
        return np.corrcoef(x[:, i], x[:, j])[0, 1]
    z = np.column_stack([np.ones(x.shape[0]), x[:, list(s)]])
    ri = x[:, i] - z @ np.linalg.lstsq(z, x[:, i], rcond=None)[0]
    rj = x[:, j] - z @ np.linalg.lstsq(z, x[:, j], rcond=None)[0]
    return np.corrcoef(ri, rj)[0, 1]


# -- datasets and sufficient statistics ----------------------------------------


def test_dataset_rejects_missing_values_and_ragged_rows():
    with pytest.raises(DataFormatError):
        Dataset(np.array([[1.0, np.nan], [0.0, 1.0]]), ("a", "b"))
    with pytest.raises(DataFormatError):
        Dataset.from_csv_text("a,b\n1.0\n")
    with pytest.raises(DataFormatError):
        Dataset.from_csv_text("a,b\n1.0,x\n")


def test_dataset_csv_round_trip():
    rng = np.random.default_rng(0)
    data = Dataset(rng.standard_normal((5, 3)), ("u", "v", "w"))
    back = Dataset.from_csv_text(data.to_csv_text())
    assert back.labels == data.labels
    assert np.array_equal(back.values, data.values)


def test_suffstat_flags_constant_columns():
    x = np.ones((10, 2))
    x[:, 0] = np.arange(10)
    with pytest.raises(CIDegeneracyError):
        SuffStat.from_dataset(Dataset(x, ("a", "b")))


def test_suffstat_rejects_invalid_matrices():
    with pytest.raises(ValueError):
        SuffStat(np.array([[1.0, 0.5], [0.1, 1.0]]), 10)  # asymmetric
    with pytest.raises(ValueError):
        SuffStat(np.array([[2.0, 0.0], [0.0, 1.0]]), 10)  # bad diagonal
    with pytest.raises(ValueError):
        SuffStat(np.array([[1.0, 1.5], [1.5, 1.0]]), 10)  # out of range


def test_suffstat_properties():
    rng = np.random.default_rng(1)
    st = SuffStat.from_dataset(Dataset(rng.standard_normal((50, 4)), tuple("abcd")))
    assert st.p == 4 and st.n == 50
    assert np.allclose(st.correlation, st.correlation.T)
    assert np.allclose(np.diag(st.correlation), 1.0)
    assert np.all(np.abs(st.correlation) <= 1.0 + 1e-12)


# -- oracle backend ---------------------------------------------------------


def test_oracle_backend_matches_d_separation(collider_dag):
    oracle = OracleBackend(collider_dag)
    assert oracle.independent(0, 1, (2,))
    assert not oracle.independent(0, 1, (3,))
    coll = OracleBackend(Dag(3, [(0, 1), (2, 1)]))
    assert not coll.independent(0, 2, (1,))
    with pytest.raises(ValueError):
        oracle.independent(0, 0, ())


# -- gaussian backend ---------------------------------------------------------


def test_gauss_identity_correlation_is_independent():
    st = SuffStat(np.eye(5), 1000)
    backend = GaussBackend(st, 0.05)
    assert backend.independent(0, 1, ())
    assert backend.independent(0, 4, (2, 3))


def test_gauss_perfect_correlation_is_dependent():
    corr = np.eye(2)
    corr[0, 1] = corr[1, 0] = 1.0
    backend = GaussBackend(SuffStat(corr, 100), 0.01)
    assert not backend.independent(0, 1, ())


def test_gauss_partial_correlation_matches_residual_oracle():
    rng = np.random.default_rng(12345)
    n = 400
    a = rng.standard_normal(n)
    b = 0.7 * a + 0.5 * rng.standard_normal(n)
    c = 0.4 * a - 0.6 * b + rng.standard_normal(n)
    x = np.column_stack([a, b, c])
    st = SuffStat.from_dataset(Dataset(x, ("a", "b", "c")))
    backend = GaussBackend(st, 0.05)
    for i, j, s in [(0, 1, ()), (0, 2, (1,)), (1, 2, (0,)), (0, 1, (2,))]:
        assert backend.partial_correlation(i, j, s) == pytest.approx(
            _residual_partial_corr(x, i, j, s), abs=1e-10
        )


def test_gauss_dof_guard_reports_dependence():
    rng = np.random.default_rng(3)
    x = rng.standard_normal((5, 4))
    backend = GaussBackend(SuffStat.from_dataset(Dataset(x, tuple("abcd"))), 0.05)
    # n - |s| - 3 < 1 for |s| = 2 at n = 5
    assert not backend.independent(0, 1, (2, 3))


def test_gauss_singular_submatrix_flagged():
    # duplicated variable: the conditioning submatrix is exactly singular
    rng = np.random.default_rng(4)
    a = rng.standard_normal(100)
    b = rng.standard_normal(100)
    x = np.column_stack([a, b, a])
    backend = GaussBackend(SuffStat.from_dataset(Dataset(x, ("a", "b", "a2"))), 0.05)
    backend.independent(0, 1, (2,))
    assert backend.degenerate_queries >= 1


def test_gauss_rejects_bad_alpha():
    with pytest.raises(ValueError):
        GaussBackend(SuffStat(np.eye(2), 10), 0.0)


def test_gauss_cutoff_convention():
    backend = GaussBackend(SuffStat(np.eye(2), 100), 0.1)
    assert backend.cutoff == pytest.approx(norm.ppf(0.95))


def test_gauss_null_rejection_rate_sanity():
    # quick check; the full calibration at 1000 replicates runs in acceptance
    rng = np.random.default_rng(777)
    alpha, reps, n = 0.1, 400, 300
    rejections = 0
    for _ in range(reps):
        z = rng.standard_normal(n)
        x = 0.8 * z + rng.standard_normal(n)
        y = -0.5 * z + rng.standard_normal(n)
        st = SuffStat.from_dataset(Dataset(np.column_stack([x, y, z]), ("x", "y", "z")))
        if not GaussBackend(st, alpha).independent(0, 1, (2,)):
            rejections += 1
    rate = rejections / reps
    se = np.sqrt(alpha * (1 - alpha) / reps)
    assert abs(rate - alpha) < 4 * se


# -- wrappers ---------------------------------------------------------------


def test_counting_backend_tallies_by_phase_and_size(collider_dag):
    counting = CountingBackend(OracleBackend(collider_dag))
    counting.set_phase("skeleton")
    for pair in [(0, 1), (0, 2), (1, 2)]:
        counting.independent(*pair, ())
    assert counting.by_size("skeleton") == {0: 3}
    counting.set_phase("vstructure")
    counting.independent(0, 1, (2,))
    assert counting.counts == {("skeleton", 0): 3, ("vstructure", 1): 1}
    assert counting.total() == 4
    assert counting.snapshot() == {"skeleton": [3], "vstructure": [0, 1]}


def test_counting_backend_empty_run():
    counting = CountingBackend(OracleBackend(Dag(2)))
    assert counting.counts == {} and counting.total() == 0 and counting.snapshot() == {}


def test_tiers_reduce_round_one_test_count():
    # paired run on the same data: tier-restricted candidate sets can only
    # shrink the size-1 round of the skeleton phase
    rng = np.random.default_rng(9)
    dag = gen_dag(10, 0.4, rng)
    data = sample_data(gen_sem(dag, rng), 600, rng)
    st = SuffStat.from_dataset(data)
    counts = {}
    for name, tau in [("t1", TieredOrdering.single_tier(10)),
                      ("t5", TieredOrdering([1, 1, 2, 2, 3, 3, 4, 4, 5, 5]))]:
        counting = CountingBackend(GaussBackend(st, 0.05))
        run_state(DiscoveryConfig(alpha=0.05), 10, tau, counting)
        counts[name] = counting.by_size("skeleton")
    assert counts["t5"].get(1, 0) <= counts["t1"].get(1, 0)
    assert counts["t5"].get(0, 0) == counts["t1"].get(0, 0)


def test_noisy_backend_forced_answer_and_canonicalization(collider_dag):
    oracle = OracleBackend(collider_dag)
    noisy = NoisyBackend(oracle, {(0, 1, (3,)): True})
    assert noisy.independent(0, 1, (3,))
    assert noisy.independent(1, 0, (3,))  # order-free key
    assert canonical_query(1, 0, (3,)) == (0, 1, (3,))
    # everything else delegates
    assert noisy.independent(0, 1, (2,)) == oracle.independent(0, 1, (2,))


def test_noisy_backend_empty_schedule_is_identity(collider_dag):
    oracle = OracleBackend(collider_dag)
    noisy = NoisyBackend(oracle, {})
    for i, j, s in [(0, 1, ()), (0, 1, (2,)), (0, 1, (3,)), (2, 3, ())]:
        assert noisy.independent(i, j, s) == oracle.independent(i, j, s)


def test_query_symmetry_across_backends(collider_dag):
    rng = np.random.default_rng(17)
    data = sample_data(gen_sem(collider_dag, rng), 200, rng)
    backends = [
        OracleBackend(collider_dag),
        GaussBackend(SuffStat.from_dataset(data), 0.05),
        NoisyBackend(OracleBackend(collider_dag), {(0, 1, ()): False}),
        CountingBackend(OracleBackend(collider_dag)),
    ]
    for backend in backends:
        for _ in range(20):
            i, j = (int(v) for v in rng.choice(4, size=2, replace=False))
            rest = [v for v in range(4) if v not in (i, j)]
            k = int(rng.integers(0, 3))
            s = tuple(int(v) for v in rng.choice(rest, size=k, replace=False))
            assert backend.independent(i, j, s) == backend.independent(j, i, s)
