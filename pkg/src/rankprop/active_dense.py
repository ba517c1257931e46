"""Dense posterior covariance and exact information-gain suggestion.

The propagation solution is the mean of a Gaussian posterior whose
covariance is C = (L + lambda H)^{-1}. Marking point i labeled adds 1 to
the i-th diagonal entry of C^{-1}, so C itself is maintained by the
rank-one downdate

    C <- C - C[:, i] C[i, :] / (1 + C[i, i])

and the total predictive-variance reduction that labeling i would cause,
summed over all points, has the closed form

    gain(i) = |C[:, i]|^2 / (1 + C[i, i])

which never needs the label's value. Everything here is dense and limited
to a working subset of at most `cap` items; the eigenbasis variant in
active_sparse covers larger databases.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import ValidationError

DENSE_CAP = 2000


@dataclass
class SuggestionList:
    """Items ranked by suggestion score, best first."""
    items: list   # of (item_index, gain) with gains non-increasing

    def __len__(self):
        return len(self.items)

    def indices(self):
        return [i for i, _ in self.items]


@dataclass
class CovarianceState:
    C: np.ndarray                 # (s, s) symmetric PD
    subset: np.ndarray            # maps working index -> item index
    labeled: set = field(default_factory=set)
    t: int = 0

    @property
    def s(self):
        return self.C.shape[0]

    def unlabeled(self):
        mask = np.ones(self.s, dtype=bool)
        if self.labeled:
            mask[sorted(self.labeled)] = False
        return np.flatnonzero(mask)


def choose_subset(u, cap=DENSE_CAP, seed=0):
    """Uniform random working subset when the database exceeds the cap."""
    if u <= cap:
        return np.arange(u)
    g = np.random.default_rng(seed)
    return np.sort(g.choice(u, cap, replace=False))


def init_covariance(H, lam, subset=None, cap=DENSE_CAP):
    """C(0) = (lambda H_sub)^{-1} over the working subset.

    The restriction of H to a subset is a principal submatrix, so it stays
    positive definite and the inverse exists.
    """
    Hm = H.matrix if hasattr(H, "matrix") else H
    u = Hm.shape[0]
    if subset is None:
        subset = np.arange(u)
    subset = np.asarray(subset, dtype=np.intp)
    if subset.size > cap:
        raise ValidationError(
            f"working subset of {subset.size} exceeds cap {cap}")
    if sp.issparse(Hm):
        Hs = Hm[subset][:, subset].toarray()
    else:
        Hs = np.asarray(Hm, dtype=np.float64)[np.ix_(subset, subset)]
    C = np.linalg.inv(lam * Hs)
    C = 0.5 * (C + C.T)
    return CovarianceState(C, subset)


def observe_label(state: CovarianceState, i):
    """Mark working index i labeled; full-matrix rank-one downdate.

    Relabeling an already-labeled point applies another unit increment,
    consistent with the noise model.
    """
    C = state.C
    if not (0 <= i < state.s):
        raise ValidationError(f"working index {i} out of range")
    c = C[:, i].copy()
    C -= np.outer(c, c) / (1.0 + c[i])
    state.labeled.add(int(i))
    state.t += 1
    return state


def info_gain(state: CovarianceState, i):
    C = state.C
    return float((C[:, i] @ C[:, i]) / (1.0 + C[i, i]))


def info_gain_many(state: CovarianceState, idx):
    C = state.C
    cols = C[:, idx]
    return (cols ** 2).sum(axis=0) / (1.0 + C[idx, idx])


def predictive_variance(state: CovarianceState):
    return state.C.diagonal().copy()


def suggest(state: CovarianceState, pool_size=1000, n=5, rng_seed=0):
    """Top-n unlabeled working indices by information gain.

    A pool of min(pool_size, #unlabeled) candidates is sampled uniformly
    with the seeded generator, then ranked by gain, descending; ties go to
    the lower item index. Deterministic for a fixed seed.
    """
    if n > pool_size:
        raise ValidationError(f"n={n} exceeds pool_size={pool_size}")
    unl = state.unlabeled()
    if unl.size == 0:
        raise ValidationError("no unlabeled points remain")
    if unl.size > pool_size:
        g = np.random.default_rng(rng_seed)
        pool = np.sort(g.choice(unl, pool_size, replace=False))
    else:
        pool = unl
    gains = info_gain_many(state, pool)
    order = np.lexsort((pool, -gains))
    top = order[:min(n, pool.size)]
    return SuggestionList([(int(pool[j]), float(gains[j])) for j in top])
