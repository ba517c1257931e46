"""Low-rank covariance for active suggestion on large databases.

The initial covariance (lambda H)^{-1} is dominated by the smallest
eigenvalues of lambda H, so its best rank-r approximation lives in the
span E of the r corresponding eigenvectors. The state kept here is the
r x r matrix M with

    Cbar(t) = E M E^T,    M(0) = diag(1 / eigenvalue)

and marking point i labeled projects the dense rank-one downdate into the
basis: with b = E[i, :]^T,

    M <- M - (M b)(M b)^T / (1 + b^T M b)
    gain(i) = |M b|^2 / (1 + b^T M b)

using the orthonormality of E's columns. Each update costs O(r^2) and a
suggestion pass costs O(pool * r^2), independent of u.
"""
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .active_dense import SuggestionList
from .errors import NumericalError, ValidationError

DENSE_EIG_LIMIT = 3000


@dataclass
class EigenBasis:
    E: np.ndarray        # (u, r), orthonormal columns
    eigenvalues: np.ndarray   # (r,), ascending, all > 0 (eigenvalues of lambda*H)
    lam: float

    @property
    def u(self):
        return self.E.shape[0]

    @property
    def r(self):
        return self.E.shape[1]


@dataclass
class LowRankCovariance:
    basis: EigenBasis
    M: np.ndarray        # (r, r) symmetric PD
    labeled: set = field(default_factory=set)
    t: int = 0


def compute_eigenbasis(H, lam, r):
    """r smallest eigenpairs of lambda H.

    Small systems go through a dense symmetric eigensolver; larger ones use
    shift-invert Lanczos, which only factorizes the sparse matrix. Each
    returned pair satisfies |lam H e - v e| <= 1e-6 v; worse residuals
    raise NumericalError.
    """
    Hm = H.matrix if hasattr(H, "matrix") else H
    u = Hm.shape[0]
    if not (1 <= r <= u):
        raise ValidationError(f"rank r={r} out of range for u={u}")
    A = (lam * Hm).tocsc() if sp.issparse(Hm) else lam * np.asarray(Hm)
    if u <= DENSE_EIG_LIMIT or r > u - 2:
        dense = A.toarray() if sp.issparse(A) else A
        vals, vecs = np.linalg.eigh(dense)
        vals, vecs = vals[:r], vecs[:, :r]
    else:
        try:
            vals, vecs = spla.eigsh(A, k=r, sigma=0, which="LM")
        except Exception as e:
            raise NumericalError(f"sparse eigensolver failed: {e}") from None
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
    res = np.linalg.norm(A @ vecs - vecs * vals, axis=0)
    # Near-null eigenvalues (the ridge floor of H) sit below the float
    # noise of the matrix-vector product itself, so the relative residual
    # criterion gets an absolute floor at machine precision times the
    # largest magnitude the product can carry.
    if sp.issparse(A):
        a_scale = float(abs(A).sum(axis=1).max())
    else:
        a_scale = float(np.abs(A).sum(axis=1).max())
    floor = 64.0 * np.finfo(float).eps * a_scale
    bad = res > np.maximum(1e-6 * vals, floor)
    if bad.any():
        j = int(np.flatnonzero(bad)[0])
        raise NumericalError(
            f"eigenpair {j} residual {res[j]:.3e} exceeds 1e-6 * {vals[j]:.3e}")
    if vals.min() <= 0:
        raise NumericalError("non-positive eigenvalue; H is not PD")
    return EigenBasis(np.ascontiguousarray(vecs), vals, lam)


def init_lowrank(basis: EigenBasis):
    return LowRankCovariance(basis, np.diag(1.0 / basis.eigenvalues))


def observe_label_sparse(state: LowRankCovariance, i):
    if not (0 <= i < state.basis.u):
        raise ValidationError(f"index {i} out of range")
    b = state.basis.E[i, :]
    Mb = state.M @ b
    state.M -= np.outer(Mb, Mb) / (1.0 + b @ Mb)
    state.labeled.add(int(i))
    state.t += 1
    return state


def info_gain_sparse(state: LowRankCovariance, i):
    b = state.basis.E[i, :]
    Mb = state.M @ b
    return float((Mb @ Mb) / (1.0 + b @ Mb))


def info_gain_sparse_many(state: LowRankCovariance, idx):
    B = state.basis.E[idx, :]          # (n, r)
    MB = B @ state.M                   # M symmetric
    return (MB ** 2).sum(axis=1) / (1.0 + (MB * B).sum(axis=1))


def predictive_variance_sparse(state: LowRankCovariance):
    E = state.basis.E
    return ((E @ state.M) * E).sum(axis=1)


def suggest_sparse(state: LowRankCovariance, pool_size=1000, n=5, rng_seed=0):
    """Same contract as the dense suggest, over the full database."""
    if n > pool_size:
        raise ValidationError(f"n={n} exceeds pool_size={pool_size}")
    mask = np.ones(state.basis.u, dtype=bool)
    if state.labeled:
        mask[sorted(state.labeled)] = False
    unl = np.flatnonzero(mask)
    if unl.size == 0:
        raise ValidationError("no unlabeled points remain")
    if unl.size > pool_size:
        g = np.random.default_rng(rng_seed)
        pool = np.sort(g.choice(unl, pool_size, replace=False))
    else:
        pool = unl
    gains = info_gain_sparse_many(state, pool)
    order = np.lexsort((pool, -gains))
    top = order[:min(n, pool.size)]
    return SuggestionList([(int(pool[j]), float(gains[j])) for j in top])


CACHE_MAGIC = b"CSEB"
CACHE_VERSION = 1


def save_eigenbasis(path, basis: EigenBasis):
    """magic "CSEB" | u32 version | u64 u, r | f64 lambda
    | r x f64 eigenvalues | u*r x f64 eigenvectors, column-major."""
    with open(path, "wb") as fh:
        fh.write(struct.pack("<4sIQQd", CACHE_MAGIC, CACHE_VERSION,
                             basis.u, basis.r, basis.lam))
        fh.write(basis.eigenvalues.astype("<f8").tobytes())
        fh.write(np.asfortranarray(basis.E.astype("<f8")).tobytes(order="F"))


def load_eigenbasis(path):
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"eigenbasis cache not found: {path}")
    raw = path.read_bytes()
    head = struct.Struct("<4sIQQd")
    if len(raw) < head.size:
        raise ValidationError(f"eigenbasis cache truncated: {path}")
    magic, version, u, r, lam = head.unpack_from(raw)
    if magic != CACHE_MAGIC:
        raise ValidationError(f"bad magic in {path}: {magic!r}")
    if version != CACHE_VERSION:
        raise ValidationError(f"unsupported cache version {version}")
    need = head.size + 8 * r + 8 * u * r
    if len(raw) != need:
        raise ValidationError(f"eigenbasis cache size mismatch: {path}")
    vals = np.frombuffer(raw, dtype="<f8", count=r, offset=head.size).copy()
    E = np.frombuffer(raw, dtype="<f8", count=u * r,
                      offset=head.size + 8 * r).reshape((u, r), order="F")
    return EigenBasis(np.ascontiguousarray(E), vals, float(lam))
