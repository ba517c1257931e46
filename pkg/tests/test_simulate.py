"""Simulated-user learning curves: oracle semantics, reproducibility,
strategy plumbing, and the CSV export formats."""
import csv

import numpy as np
import pytest

from rankprop import (
    ManifoldConfig,
    OracleLabeler,
    ValidationError,
    build_knn,
    build_regularizer,
    compute_eigenbasis,
    export_curves_csv,
    init_curve_state,
    make_manifold,
    run_learning_curve,
)
from rankprop.simulate import STRATEGIES

LAM = 1e-4


@pytest.fixture(scope="module")
def med_pair():
    F, gt, _ = make_manifold(200, d=10, seed=9, noise=0.05)
    reg = build_regularizer(F, build_knn(F, 8), ManifoldConfig(k=8, m=5, noise=0.1))
    return reg, gt


# ---------------------------------------------------------------- oracle

def test_oracle_exact_rank_spacing():
    gt = np.array([0.3, -1.2, 2.0, 0.9, -0.4])
    oracle = OracleLabeler(gt)
    y = oracle.labels_for(np.arange(5))
    # evenly spaced on [-1, 1], ordered like the ground truth
    assert sorted(y) == pytest.approx([-1.0, -0.5, 0.0, 0.5, 1.0])
    assert np.array_equal(np.argsort(y), np.argsort(gt, kind="stable"))
    # worst and best of the queried set sit at the endpoints
    assert y[1] == -1.0 and y[2] == 1.0


def test_oracle_exact_rank_subset_query():
    gt = np.linspace(-1, 1, 40)
    oracle = OracleLabeler(gt)
    idx = np.array([31, 2, 17])
    y = oracle.labels_for(idx)
    assert list(y) == [1.0, -1.0, 0.0]


def test_oracle_single_item_is_zero():
    oracle = OracleLabeler(np.array([5.0, -3.0, 1.0]))
    assert oracle.labels_for(np.array([1]))[0] == 0.0


def test_oracle_forced_binary():
    gt = np.array([0.5, -0.1, 0.0, -2.0, 3.0])
    y = OracleLabeler(gt, mode="forced-binary").labels_for(np.arange(5))
    assert list(y) == [1.0, -1.0, 1.0, -1.0, 1.0]


def test_oracle_noisy_rank_is_frozen():
    gt = np.random.default_rng(3).normal(size=50)
    oracle = OracleLabeler(gt, mode="noisy-rank", sigma=0.5, seed=9)
    idx = np.arange(50)
    assert np.array_equal(oracle.labels_for(idx), oracle.labels_for(idx))
    # a fresh labeler with the same seed is the same simulated user
    twin = OracleLabeler(gt, mode="noisy-rank", sigma=0.5, seed=9)
    assert np.array_equal(oracle.labels_for(idx), twin.labels_for(idx))
    other = OracleLabeler(gt, mode="noisy-rank", sigma=0.5, seed=10)
    assert not np.array_equal(oracle.labels_for(idx), other.labels_for(idx))


def test_oracle_noisy_rank_self_consistent():
    # pairwise order agrees between overlapping queries: one internal criterion
    gt = np.random.default_rng(0).normal(size=30)
    oracle = OracleLabeler(gt, mode="noisy-rank", sigma=1.0, seed=4)
    a = oracle.labels_for(np.arange(0, 20))
    b = oracle.labels_for(np.arange(10, 30))
    for i in range(10, 20):
        for j in range(10, 20):
            assert np.sign(a[i] - a[j]) == np.sign(b[i - 10] - b[j - 10])


def test_oracle_noisy_sigma_zero_matches_exact():
    gt = np.random.default_rng(1).normal(size=25)
    idx = np.arange(25)
    exact = OracleLabeler(gt).labels_for(idx)
    noisy = OracleLabeler(gt, mode="noisy-rank", sigma=0.0).labels_for(idx)
    assert np.array_equal(exact, noisy)


def test_oracle_restricted_slices_criterion():
    gt = np.random.default_rng(2).normal(size=40)
    oracle = OracleLabeler(gt, mode="noisy-rank", sigma=0.4, seed=7)
    sub = np.array([3, 8, 21, 30, 39])
    narrow = oracle.restricted(sub)
    assert np.array_equal(narrow.internal, oracle.internal[sub])
    assert np.array_equal(narrow.labels_for(np.arange(5)),
                          oracle.labels_for(sub))


def test_oracle_validation():
    with pytest.raises(ValidationError):
        OracleLabeler(np.array([1.0, np.nan]))
    with pytest.raises(ValidationError):
        OracleLabeler(np.array([1.0, 2.0]), mode="telepathy")


# ------------------------------------------------------- curve mechanics

def test_curve_reproducible_from_seeds(tiny_regularizer):
    reg, gt = tiny_regularizer
    oracle = OracleLabeler(gt)
    kw = dict(trials=3, end_labels=20, seeds=[5, 6, 7], lam=LAM)
    a = run_learning_curve(reg, oracle, "info-gain", **kw)
    b = run_learning_curve(reg, oracle, "info-gain", **kw)
    assert a.series == b.series
    assert a.seeds == [5, 6, 7]
    c = run_learning_curve(reg, oracle, "info-gain", trials=3, end_labels=20,
                           seeds=[8, 9, 10], lam=LAM)
    assert a.series != c.series


def test_default_seeds_are_offsets(tiny_regularizer):
    reg, gt = tiny_regularizer
    oracle = OracleLabeler(gt)
    a = run_learning_curve(reg, oracle, "random", trials=2, end_labels=10,
                           lam=LAM)
    b = run_learning_curve(reg, oracle, "random", trials=2, end_labels=10,
                           seeds=[7000, 7001], lam=LAM)
    assert a.series == b.series


def test_every_strategy_runs_and_scores(tiny_regularizer):
    reg, gt = tiny_regularizer
    oracle = OracleLabeler(gt)
    basis = compute_eigenbasis(reg, LAM, reg.matrix.shape[0])
    for strategy in STRATEGIES:
        res = run_learning_curve(
            reg, oracle, strategy, trials=2, end_labels=15,
            record_at=(15,), seeds=[1, 2], lam=LAM,
            basis=basis if strategy == "info-gain-sparse" else None)
        assert res.strategy == strategy
        taus = res.at(15, "tau")
        maes = res.at(15, "mae")
        assert taus.shape == (2,) and maes.shape == (2,)
        assert np.all(np.isfinite(maes)) and np.all(maes >= 0)
        assert np.all(np.abs(taus) <= 1.0)


def test_full_rank_sparse_strategy_matches_dense(tiny_regularizer):
    # with the complete eigenbasis the projected bookkeeping is exact, so
    # the low-rank strategy must reproduce the dense info-gain sessions
    reg, gt = tiny_regularizer
    oracle = OracleLabeler(gt)
    basis = compute_eigenbasis(reg, LAM, reg.matrix.shape[0])
    kw = dict(trials=3, end_labels=25, seeds=[11, 12, 13], lam=LAM)
    dense = run_learning_curve(reg, oracle, "info-gain", **kw)
    sparse = run_learning_curve(reg, oracle, "info-gain-sparse",
                                basis=basis, **kw)
    for ta, tb in zip(dense.series, sparse.series):
        for ra, rb in zip(ta, tb):
            assert ra[0] == rb[0]
            assert ra[1:] == pytest.approx(rb[1:], rel=1e-9, abs=1e-9)


def test_checkpoint_recording_matches_full(tiny_regularizer):
    # selection never reads label values, so solving only at checkpoints
    # must give the same rows as recording every step
    reg, gt = tiny_regularizer
    oracle = OracleLabeler(gt)
    full = run_learning_curve(reg, oracle, "max-variance", trials=3,
                              end_labels=25, seeds=[11, 12, 13], lam=LAM)
    chk = run_learning_curve(reg, oracle, "max-variance", trials=3,
                             end_labels=25, record_at=(10, 25),
                             seeds=[11, 12, 13], lam=LAM)
    for ta, tb in zip(full.series, chk.series):
        rows = {r[0]: r for r in ta}
        assert [rows[n] for n in (10, 25)] == tb


def test_subset_equals_manual_restriction(med_pair):
    reg, gt = med_pair
    sub = np.sort(np.random.default_rng(4).choice(200, 80, replace=False))
    oracle = OracleLabeler(gt, mode="noisy-rank", sigma=0.3, seed=5)
    via_subset = run_learning_curve(reg, oracle, "info-gain", trials=2,
                                    end_labels=20, seeds=[1, 2], lam=LAM,
                                    subset=sub)
    manual = run_learning_curve(reg.matrix[sub][:, sub],
                                oracle.restricted(sub), "info-gain",
                                trials=2, end_labels=20, seeds=[1, 2],
                                lam=LAM)
    assert via_subset.series == manual.series


def test_shared_state_reuse(tiny_regularizer):
    reg, gt = tiny_regularizer
    oracle = OracleLabeler(gt)
    state = init_curve_state(reg, LAM, with_u=True)
    kw = dict(trials=2, end_labels=15, seeds=[3, 4], lam=LAM)
    for strategy in ("max-variance", "amershi", "info-gain"):
        fresh = run_learning_curve(reg, oracle, strategy, **kw)
        reused = run_learning_curve(reg, oracle, strategy,
                                    shared_state=state, **kw)
        assert fresh.series == reused.series


def test_init_curve_state_inverses(tiny_regularizer):
    reg, _ = tiny_regularizer
    Hd = np.asarray(reg.matrix.todense())
    C0, U0 = init_curve_state(reg, LAM, with_u=True)
    # the zero-label covariance inverts a system whose condition number is
    # set by the ridge floor, so the identity reconstruction error scales
    # with cond * eps rather than a fixed tolerance
    kappa = np.linalg.cond(LAM * Hd)
    resid = np.abs(C0 @ (LAM * Hd) - np.eye(Hd.shape[0])).max()
    assert resid < 64 * kappa * np.finfo(float).eps
    assert np.allclose(U0 @ (np.eye(Hd.shape[0]) + LAM * Hd),
                       np.eye(Hd.shape[0]), atol=1e-9)
    C0b, none = init_curve_state(reg, LAM)
    assert none is None
    assert np.array_equal(C0, C0b)


def test_curve_validation(tiny_regularizer):
    reg, gt = tiny_regularizer
    oracle = OracleLabeler(gt)
    with pytest.raises(ValidationError):
        run_learning_curve(reg, oracle, "clairvoyant", trials=1, end_labels=5)
    with pytest.raises(ValidationError):
        run_learning_curve(reg, oracle, "random", trials=2, end_labels=5,
                           seeds=[1])
    with pytest.raises(ValidationError):
        run_learning_curve(reg, oracle, "random", trials=1, start_labels=5,
                           end_labels=5)
    with pytest.raises(ValidationError):
        run_learning_curve(reg, oracle, "random", trials=1, end_labels=10**6)
    with pytest.raises(ValidationError):
        run_learning_curve(reg, oracle, "info-gain-sparse", trials=1,
                           end_labels=5)
    with pytest.raises(ValidationError):   # oracle sized for a different H
        run_learning_curve(reg, OracleLabeler(gt[:10]), "random", trials=1,
                           end_labels=5)
    with pytest.raises(ValidationError):
        run_learning_curve(reg, oracle, "random", trials=1, end_labels=5,
                           subset=np.array([0, 0, 1]))
    with pytest.raises(ValidationError):
        run_learning_curve(reg, oracle, "random", trials=1, end_labels=5,
                           subset=np.array([0, 10**6]))


# ------------------------------------------------------- curve behavior

def test_binary_labels_rank_worse_than_exact(small_regularizer, small_manifold):
    # collapsing the user's ranking to good/bad discards most of the
    # ordering signal; at 50 labels the gap is far above trial noise
    reg = small_regularizer
    _, gt = small_manifold
    kw = dict(trials=8, end_labels=50, record_at=(50,),
              seeds=list(range(40, 48)))
    exact = run_learning_curve(reg, OracleLabeler(gt), "random", **kw)
    binary = run_learning_curve(
        reg, OracleLabeler(gt, mode="forced-binary"), "random", **kw)
    t_exact = exact.at(50, "tau").mean()
    t_binary = binary.at(50, "tau").mean()
    assert t_exact > t_binary + 0.15
    assert binary.at(50, "mae").mean() > exact.at(50, "mae").mean()


def test_random_mae_trends_down(med_pair):
    reg, gt = med_pair
    res = run_learning_curve(reg, OracleLabeler(gt), "random", trials=6,
                             end_labels=50, seeds=list(range(21, 27)))
    rows = res.summary()
    counts = np.array([r[0] for r in rows], dtype=float)
    means = np.array([r[1] for r in rows])
    slope = np.polyfit(counts, means, 1)[0]
    assert slope < 0
    assert means[-1] < 0.5 * means[0]


def test_summary_rows(tiny_regularizer):
    reg, gt = tiny_regularizer
    res = run_learning_curve(reg, OracleLabeler(gt), "random", trials=4,
                             end_labels=12, record_at=(6, 12),
                             seeds=[1, 2, 3, 4], lam=LAM)
    rows = res.summary()
    assert [r[0] for r in rows] == [6, 12]
    for n, mm, ms, tm, ts in rows:
        m, t = res.at(n, "mae"), res.at(n, "tau")
        assert mm == pytest.approx(m.mean()) and ms == pytest.approx(m.std())
        assert tm == pytest.approx(t.mean()) and ts == pytest.approx(t.std())
        assert all(isinstance(v, float) for v in (mm, ms, tm, ts))


# --------------------------------------------------------------- export

def test_curves_csv_round_trip(tmp_path, tiny_regularizer):
    reg, gt = tiny_regularizer
    results = [
        run_learning_curve(reg, OracleLabeler(gt), s, trials=2,
                           end_labels=10, record_at=(5, 10), seeds=[1, 2],
                           lam=LAM)
        for s in ("random", "info-gain")
    ]
    per_trial = tmp_path / "curves.csv"
    summary = tmp_path / "summary.csv"
    export_curves_csv(per_trial, results, summary_path=summary)

    with open(per_trial, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["strategy", "trial", "seed", "n_labels", "mae", "tau"]
    assert len(rows) == 1 + 2 * 2 * 2
    got = {}
    for strat, trial, seed, n, m, tau in rows[1:]:
        got[(strat, int(trial), int(n))] = (float(m), float(tau))
        assert int(seed) == [1, 2][int(trial)]
    for res in results:
        for t, trial in enumerate(res.series):
            for n, m, tau in trial:
                # repr round-trips the floats exactly
                assert got[(res.strategy, t, n)] == (m, tau)

    with open(summary, newline="") as fh:
        srows = list(csv.reader(fh))
    assert srows[0] == ["strategy", "n_labels", "mae_mean", "mae_std",
                        "tau_mean", "tau_std"]
    assert len(srows) == 1 + 2 * 2
    for res in results:
        for c, mm, ms, tm, ts in res.summary():
            match = [r for r in srows[1:]
                     if r[0] == res.strategy and int(r[1]) == c]
            assert len(match) == 1
            assert [float(x) for x in match[0][2:]] == [mm, ms, tm, ts]
