"""Label-selection strategies used as comparison baselines.

Four selectors share one interface: given the current covariance state
(and, for the normalized variant, a companion matrix), return the top-n
unlabeled candidates.

* random: uniform over unlabeled points.
* max-variance: largest predictive variance. Simple, but planted outliers
  have the largest variances by construction, so this strategy chases
  them.
* normalized-variance: variance divided by the variance that would remain
  if every other unlabeled point were observed. The normalizer is large
  exactly where the point is locally hard to predict (outliers, noisy
  regions), which suppresses the outlier-chasing of raw max-variance; it
  also makes the strategy skip hard-but-informative regions, which is its
  characteristic weakness.
* info-gain: exact total variance reduction (the suggestion default).

The normalizer comes from the companion matrix U, the posterior covariance
computed as if all currently-unlabeled points were observed. U starts at
(I + lambda H)^{-1} and when a point becomes genuinely labeled its
pseudo-observation is removed by the inverse rank-one update

    U <- U + U[:, i] U[i, :] / (1 - U[i, i]).

Removing i's own pseudo-observation from U in the same way gives the
leave-one-out variance used as the denominator,

    Var(i | other unlabeled observed) = U[i, i] / (1 - U[i, i]).

Using diag(U) directly would be meaningless here: with every unlabeled
point observed, all its entries sit just below 1 regardless of geometry,
and the score would collapse to raw max-variance, outliers first.
"""
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .active_dense import CovarianceState, SuggestionList, info_gain_many
from .errors import ValidationError


@dataclass
class UCovariance:
    """Covariance with all unlabeled points pseudo-observed."""
    U: np.ndarray
    labeled: set

    @classmethod
    def initial(cls, H, lam, subset=None):
        Hm = H.matrix if hasattr(H, "matrix") else H
        if subset is None:
            subset = np.arange(Hm.shape[0])
        subset = np.asarray(subset, dtype=np.intp)
        if sp.issparse(Hm):
            Hs = Hm[subset][:, subset].toarray()
        else:
            Hs = np.asarray(Hm, dtype=np.float64)[np.ix_(subset, subset)]
        U = np.linalg.inv(np.eye(subset.size) + lam * Hs)
        return cls(0.5 * (U + U.T), set())

    def mark_labeled(self, i):
        """Point i stopped being unlabeled; lift its pseudo-observation."""
        u = self.U[:, i].copy()
        denom = 1.0 - u[i]
        if denom <= 0:
            raise ValidationError("U update denominator vanished")
        self.U += np.outer(u, u) / denom
        self.labeled.add(int(i))
        return self

    def leave_one_out_variance(self, idx):
        d = self.U[idx, idx]
        return d / np.maximum(1.0 - d, 1e-300)


def _top(pool, scores, n):
    order = np.lexsort((pool, -scores))
    top = order[:min(n, pool.size)]
    return SuggestionList([(int(pool[j]), float(scores[j])) for j in top])


def select_random(unlabeled, n, seed):
    unlabeled = np.asarray(unlabeled)
    if n > unlabeled.size:
        raise ValidationError(f"n={n} exceeds {unlabeled.size} unlabeled")
    g = np.random.default_rng(seed)
    picks = g.choice(unlabeled, n, replace=False)
    return SuggestionList([(int(i), 0.0) for i in picks])


def select_max_variance(state: CovarianceState, n):
    unl = state.unlabeled()
    if unl.size == 0:
        raise ValidationError("no unlabeled points remain")
    return _top(unl, state.C[unl, unl], n)


def select_amershi(state: CovarianceState, u_cov: UCovariance, n):
    """Top-n by normalized variance diag(C) / leave-one-out variance."""
    if u_cov.labeled != state.labeled:
        raise ValidationError("U covariance labeled set is out of sync")
    unl = state.unlabeled()
    if unl.size == 0:
        raise ValidationError("no unlabeled points remain")
    scores = state.C[unl, unl] / u_cov.leave_one_out_variance(unl)
    return _top(unl, scores, n)


def select_infogain(state: CovarianceState, n):
    unl = state.unlabeled()
    if unl.size == 0:
        raise ValidationError("no unlabeled points remain")
    return _top(unl, info_gain_many(state, unl), n)
