"""Rank-quality metrics and reporting helpers.

Kendall's tau here is the plain (tau-a) pair-counting statistic between two
orderings: (concordant - discordant) / (n(n-1)/2). A tau of 0.8 means nine
times more item pairs agree than disagree, which is the operational way to
read the number.

MAE against a ground-truth criterion is scale-free by default: learned
criteria are defined only up to an affine transform, so the best affine map
onto the ground truth is fitted first and the mean absolute residual
reported.
"""
import numpy as np
from scipy import stats

from .errors import ValidationError

# Fitted conversion from tau to a 1-7 usefulness rating, and the measured
# human-to-human rank agreement; both are external constants shipped for
# report annotation, not derived here.
USEFULNESS_LINE = (4.8, 1.3)
HUMAN_AGREEMENT_TAU = 0.619


def _rank_positions(order):
    order = np.asarray(order)
    n = order.size
    pos = np.empty(n, dtype=np.int64)
    pos[order] = np.arange(n)
    return pos


def kendall_tau(order_a, order_b):
    """Tau between two permutations of the same items.

    Arguments are orderings (sequences of item indices); a pair of items is
    concordant when both orderings place them the same way around.
    """
    a = np.asarray(order_a)
    b = np.asarray(order_b)
    if a.shape != b.shape:
        raise ValidationError("orderings differ in length")
    n = a.size
    if n < 2:
        raise ValidationError("tau needs at least 2 items")
    for name, o in (("first", a), ("second", b)):
        if not np.array_equal(np.sort(o), np.arange(n)):
            raise ValidationError(f"{name} argument is not a permutation")
    pa, pb = _rank_positions(a), _rank_positions(b)
    # permutations never tie, so the tau-b the library computes coincides
    # with the plain pair-counting tau
    return float(stats.kendalltau(pa, pb).statistic)


def agreement_ratio(tau):
    """Agreeing-to-disagreeing pair ratio implied by a tau value."""
    if tau >= 1.0:
        return np.inf
    return (1.0 + tau) / (1.0 - tau)


def usefulness_score(tau):
    """Predicted usefulness rating for a tau, via the fitted line."""
    slope, intercept = USEFULNESS_LINE
    return slope * tau + intercept


def mae(f, ground_truth, scale_free=True):
    """Mean absolute error of f against a ground-truth criterion.

    With scale_free (the default), the best affine map f -> ground_truth is
    fitted by least squares first.
    """
    f = np.asarray(f, dtype=np.float64).ravel()
    g = np.asarray(ground_truth, dtype=np.float64).ravel()
    if f.shape != g.shape:
        raise ValidationError("length mismatch between f and ground truth")
    if scale_free:
        A = np.vstack([f, np.ones_like(f)]).T
        coef, *_ = np.linalg.lstsq(A, g, rcond=None)
        f = A @ coef
    return float(np.mean(np.abs(f - g)))
