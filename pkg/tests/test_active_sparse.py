import numpy as np
import pytest

from rankprop import (ManifoldConfig, NumericalError, build_knn,
                      build_regularizer, compute_eigenbasis, info_gain,
                      info_gain_many, info_gain_sparse, init_covariance,
                      init_lowrank, load_eigenbasis, make_manifold,
                      observe_label, observe_label_sparse, predictive_variance,
                      predictive_variance_sparse, save_eigenbasis, suggest,
                      suggest_sparse)

from rankprop.active_sparse import info_gain_sparse_many

LAM = 1e-4


@pytest.fixture(scope="module")
def tiny50():
    # model noise 0.1 keeps the system's condition number near 1e6, so the
    # 1e-8 dense-vs-projected comparisons measure algebra rather than
    # float round-off amplification
    F, _, _ = make_manifold(50, d=6, seed=4, noise=0.03)
    graph = build_knn(F, 5)
    return build_regularizer(F, graph, ManifoldConfig(k=5, m=3, noise=0.1))


@pytest.fixture(scope="module")
def full_rank_pair(tiny50):
    basis = compute_eigenbasis(tiny50, LAM, 50)
    return tiny50, basis


def test_basis_orthonormal_ascending(full_rank_pair):
    _, basis = full_rank_pair
    G = basis.E.T @ basis.E
    assert np.abs(G - np.eye(50)).max() <= 1e-8
    assert np.all(np.diff(basis.eigenvalues) >= -1e-18)
    assert np.all(basis.eigenvalues > 0)


def test_eigenpair_residuals(tiny50):
    basis = compute_eigenbasis(tiny50, LAM, 20)
    A = LAM * np.asarray(tiny50.matrix.todense())
    for j in range(20):
        e, v = basis.E[:, j], basis.eigenvalues[j]
        assert np.linalg.norm(A @ e - v * e) <= 1e-6 * v


def test_full_rank_recovers_dense_c0(full_rank_pair):
    reg, basis = full_rank_pair
    dense = init_covariance(reg, LAM)
    state = init_lowrank(basis)
    C_bar = basis.E @ state.M @ basis.E.T
    assert np.abs(C_bar - dense.C).max() <= 1e-8 * np.abs(dense.C).max()


def test_observe_matches_dense_at_full_rank(full_rank_pair):
    reg, basis = full_rank_pair
    dense = init_covariance(reg, LAM)
    state = init_lowrank(basis)
    rng = np.random.default_rng(1)
    for _ in range(10):
        i = int(rng.integers(0, 50))
        observe_label(dense, i)
        observe_label_sparse(state, i)
        C_bar = basis.E @ state.M @ basis.E.T
        assert np.abs(C_bar - dense.C).max() <= 1e-8 * np.abs(dense.C).max()


def test_gain_matches_dense_at_full_rank(full_rank_pair):
    reg, basis = full_rank_pair
    dense = init_covariance(reg, LAM)
    state = init_lowrank(basis)
    for step, lab in enumerate((7, 31)):
        gains_d = np.array([info_gain(dense, i) for i in range(50)])
        gains_s = np.array([info_gain_sparse(state, i) for i in range(50)])
        assert np.abs(gains_s - gains_d).max() <= 1e-8 * gains_d.max()
        observe_label(dense, lab)
        observe_label_sparse(state, lab)


def test_gain_nonnegative(full_rank_pair):
    _, basis = full_rank_pair
    state = init_lowrank(basis)
    observe_label_sparse(state, 3)
    assert all(info_gain_sparse(state, i) >= 0 for i in range(50))


def test_gain_many_matches_scalar(full_rank_pair):
    _, basis = full_rank_pair
    state = init_lowrank(basis)
    observe_label_sparse(state, 9)
    idx = np.array([0, 5, 17, 44])
    many = info_gain_sparse_many(state, idx)
    each = np.array([info_gain_sparse(state, int(i)) for i in idx])
    assert np.allclose(many, each, rtol=1e-12)


def test_variance_matches_dense_at_full_rank(full_rank_pair):
    reg, basis = full_rank_pair
    dense = init_covariance(reg, LAM)
    state = init_lowrank(basis)
    observe_label(dense, 12)
    observe_label_sparse(state, 12)
    vd = predictive_variance(dense)
    vs = predictive_variance_sparse(state)
    assert np.abs(vs - vd).max() <= 1e-8 * vd.max()
    assert np.all(vs >= 0)


def test_projected_variance_strictly_drops(full_rank_pair):
    _, basis = full_rank_pair
    state = init_lowrank(basis)
    b = basis.E[17]
    before = b @ state.M @ b
    observe_label_sparse(state, 17)
    after = b @ state.M @ b
    assert after < before


def test_m_stays_pd(full_rank_pair):
    _, basis = full_rank_pair
    state = init_lowrank(basis)
    rng = np.random.default_rng(2)
    for _ in range(15):
        observe_label_sparse(state, int(rng.integers(0, 50)))
        np.linalg.cholesky(state.M)
        assert np.abs(state.M - state.M.T).max() <= 1e-12 * np.abs(state.M).max()


def test_order_dependence_matches_dense_oracle(full_rank_pair):
    """Updates do not commute in general; each order must match the dense
    state produced by the same order."""
    reg, basis = full_rank_pair
    for order in ((4, 23), (23, 4)):
        dense = init_covariance(reg, LAM)
        state = init_lowrank(basis)
        for i in order:
            observe_label(dense, i)
            observe_label_sparse(state, i)
        C_bar = basis.E @ state.M @ basis.E.T
        assert np.abs(C_bar - dense.C).max() <= 1e-8 * np.abs(dense.C).max()


def test_variance_error_monotone_in_r(tiny50):
    dense = init_covariance(tiny50, LAM)
    target = predictive_variance(dense)
    errs = []
    for r in (10, 20, 30, 40, 50):
        basis = compute_eigenbasis(tiny50, LAM, r)
        vs = predictive_variance_sparse(init_lowrank(basis))
        errs.append(np.abs(vs - target).max())
    for a, b in zip(errs, errs[1:]):
        assert b <= a * (1 + 1e-9)


def test_low_rank_is_underestimate(tiny50):
    dense = init_covariance(tiny50, LAM)
    target = predictive_variance(dense)
    basis = compute_eigenbasis(tiny50, LAM, 20)
    vs = predictive_variance_sparse(init_lowrank(basis))
    assert np.all(vs <= target + 1e-8 * target.max())


def test_suggestion_agreement_with_dense():
    """With r capturing >= 99% of the total inverse-eigenvalue mass, the
    sparse top suggestion must realize >= 90% of the dense top gain."""
    F, _, _ = make_manifold(2000, d=20, seed=3, noise=0.05)
    graph = build_knn(F, 15)
    reg = build_regularizer(F, graph, ManifoldConfig(k=15, m=8))
    lam = 1e-6
    dense_full = np.linalg.inv(lam * np.asarray(reg.matrix.todense()))
    inv_mass_total = np.trace(dense_full)
    r = 40
    basis = compute_eigenbasis(reg, lam, r)
    mass = (1.0 / basis.eigenvalues).sum()
    assert mass >= 0.99 * inv_mass_total, (
        f"fixture must capture 99% mass, got {mass / inv_mass_total:.4f}")
    hits = 0
    for s in range(10):
        dense = init_covariance(reg, lam)
        state = init_lowrank(basis)
        rng = np.random.default_rng(100 + s)
        for i in rng.choice(2000, 3, replace=False):
            observe_label(dense, int(i))
            observe_label_sparse(state, int(i))
        top_dense = suggest(dense, pool_size=2000, n=1, rng_seed=s).items[0]
        top_sparse = suggest_sparse(state, pool_size=2000, n=1, rng_seed=s).items[0]
        dense_gain_of_sparse_pick = info_gain(dense, top_sparse[0])
        if dense_gain_of_sparse_pick >= 0.90 * top_dense[1]:
            hits += 1
    assert hits == 10


def test_suggest_sparse_deterministic(full_rank_pair):
    _, basis = full_rank_pair
    state = init_lowrank(basis)
    observe_label_sparse(state, 2)
    a = suggest_sparse(state, pool_size=10, n=4, rng_seed=9)
    b = suggest_sparse(state, pool_size=10, n=4, rng_seed=9)
    assert a.items == b.items
    assert not any(i == 2 for i, _ in a.items)


def test_cache_round_trip(tmp_path, tiny50):
    basis = compute_eigenbasis(tiny50, LAM, 12)
    save_eigenbasis(tmp_path / "b.cseb", basis)
    back = load_eigenbasis(tmp_path / "b.cseb")
    assert back.lam == basis.lam
    assert np.array_equal(back.eigenvalues, basis.eigenvalues)
    assert np.array_equal(back.E, basis.E)
    save_eigenbasis(tmp_path / "b2.cseb", back)
    assert ((tmp_path / "b.cseb").read_bytes()
            == (tmp_path / "b2.cseb").read_bytes())


def test_iterative_solver_path_matches_dense_path():
    """u above the dense-eigh cutoff goes through the sparse eigensolver;
    force both paths on one input and compare."""
    import rankprop.active_sparse as asp
    F, _, _ = make_manifold(200, d=10, seed=6, noise=0.05)
    graph = build_knn(F, 8)
    reg = build_regularizer(F, graph, ManifoldConfig(k=8, m=4))
    dense_basis = compute_eigenbasis(reg, LAM, 15)
    old = asp.DENSE_EIG_LIMIT
    try:
        asp.DENSE_EIG_LIMIT = 10
        sparse_basis = compute_eigenbasis(reg, LAM, 15)
    finally:
        asp.DENSE_EIG_LIMIT = old
    assert np.allclose(sparse_basis.eigenvalues, dense_basis.eigenvalues,
                       rtol=1e-6)
    for j in range(15):
        dot = abs(sparse_basis.E[:, j] @ dense_basis.E[:, j])
        assert dot == pytest.approx(1.0, abs=1e-5)
