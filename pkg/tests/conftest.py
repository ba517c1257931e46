import numpy as np
import pytest

from rankprop import (ManifoldConfig, build_knn, build_regularizer,
                      make_manifold)


@pytest.fixture(scope="session")
def small_manifold():
    """300 points on the wavy curve, light noise, no outliers."""
    F, gt, _ = make_manifold(300, d=12, seed=5, noise=0.05)
    return F, gt


@pytest.fixture(scope="session")
def small_regularizer(small_manifold):
    F, _ = small_manifold
    graph = build_knn(F, 10)
    return build_regularizer(F, graph, ManifoldConfig(k=10, m=5))


@pytest.fixture(scope="session")
def outlier_manifold():
    """400 points with 8 planted far-off-manifold outliers."""
    F, gt, out_idx = make_manifold(400, d=16, seed=11, n_outliers=8,
                                   outlier_scale=6.0, noise=0.05)
    return F, gt, out_idx


@pytest.fixture(scope="session")
def outlier_regularizer(outlier_manifold):
    F, _, _ = outlier_manifold
    graph = build_knn(F, 12)
    return build_regularizer(F, graph, ManifoldConfig(k=12, m=6))


@pytest.fixture(scope="session")
def tiny_regularizer():
    """60 points, small enough for dense matrix oracles."""
    F, gt, _ = make_manifold(60, d=8, seed=2, noise=0.03)
    graph = build_knn(F, 6)
    return build_regularizer(F, graph, ManifoldConfig(k=6, m=4)), gt


def dense_matrix(H):
    """Accept a RegularizerMatrix or a raw sparse matrix."""
    M = getattr(H, "matrix", H)
    return np.asarray(M.todense())


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    import _report
    if _report.lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_report.lines):
            terminalreporter.write_line(line)
