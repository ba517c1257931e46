"""Exact k-nearest-neighbor graph by brute force.

Distances are exact Euclidean; ties are broken toward the lower item index
so graphs are fully deterministic. Scans are chunked so the pairwise
distance block never exceeds a bounded working set, which keeps u in the
tens of thousands tractable without an approximate index.
"""
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .validation import check_features


@dataclass
class NeighborGraph:
    k: int
    neighbors: np.ndarray   # (u, k) int
    distances: np.ndarray   # (u, k) float64, ascending per row

    @property
    def u(self):
        return self.neighbors.shape[0]


def build_knn(F, k, chunk=1024):
    """Exact Euclidean k-NN with deterministic index tie-breaking.

    No self-neighbors; each row's distances come back sorted ascending,
    equal distances ordered by item index (argsort with a stable kind on
    distances computed in a fixed order gives exactly that).
    """
    X = check_features(F).astype(np.float64)
    u = X.shape[0]
    if not (1 <= k < u):
        raise ValidationError(f"k must satisfy 1 <= k < u, got k={k}, u={u}")
    sq = (X ** 2).sum(axis=1)
    nbr = np.empty((u, k), dtype=np.intp)
    dist = np.empty((u, k), dtype=np.float64)
    for lo in range(0, u, chunk):
        hi = min(lo + chunk, u)
        D = sq[lo:hi, None] + sq[None, :] - 2.0 * (X[lo:hi] @ X.T)
        np.clip(D, 0.0, None, out=D)
        D[np.arange(hi - lo), np.arange(lo, hi)] = np.inf
        idx = _topk_rows(D, k)
        nbr[lo:hi] = idx
        dist[lo:hi] = np.sqrt(np.take_along_axis(D, idx, axis=1))
    return NeighborGraph(k, nbr, dist)


def _topk_rows(D, k):
    """Indices of the k smallest entries per row, ties toward lower index.

    argpartition picks an arbitrary subset when equal values straddle the
    cut, so rows where the count of entries <= the k-th value exceeds k
    fall back to a full stable argsort. Real-valued distances almost never
    tie, which keeps the cheap path hot.
    """
    n = D.shape[1]
    if k >= n:
        return np.argsort(D, axis=1, kind="stable")[:, :k]
    part = np.argpartition(D, k - 1, axis=1)[:, :k]
    vals = np.take_along_axis(D, part, axis=1)
    kth = vals.max(axis=1)
    ambiguous = np.flatnonzero((D <= kth[:, None]).sum(axis=1) != k)
    order = np.argsort(vals, axis=1, kind="stable")
    idx = np.take_along_axis(part, order, axis=1)
    # equal values inside the cut still need index order, not partition order
    for r in np.flatnonzero((np.diff(np.take_along_axis(vals, order, axis=1), axis=1) == 0.0).any(axis=1)):
        if r not in ambiguous:
            row = idx[r]
            idx[r] = row[np.lexsort((row, D[r, row]))]
    for r in ambiguous:
        idx[r] = np.argsort(D[r], kind="stable")[:k]
    return idx
