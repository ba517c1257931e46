"""Simulated-user learning curves for comparing selection strategies.

One trial: pick 2 seed labels at random, then alternate select / query the
simulated user / record, until the label budget is exhausted. The
simulated user ranks whatever set of items it is shown consistently with a
fixed ground-truth criterion; modes cover an exact ranker, a forced binary
(good/bad only) labeler, and a ranker whose internal criterion carries
frozen Gaussian noise.

Selection strategies never look at label values (all are uncertainty
driven), so the propagation solve only runs at the recording checkpoints;
the recorded curves are identical to re-solving every step.

Covariance bookkeeping per trial is the rank-one downdate of the dense
state, with the companion U matrix maintained only for the normalized
variance strategy, and an eigenbasis-projected state for the low-rank
info-gain variant. The zero-label inverses are computed once and copied
per trial.
"""
import csv
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ValidationError
from .labels import LabelAssignment
from .metrics import kendall_tau, mae
from .propagation import SolverConfig, order_items, solve

STRATEGIES = ("random", "max-variance", "amershi", "info-gain",
              "info-gain-sparse")


@dataclass
class OracleLabeler:
    """Simulated user: labels any queried subset from a fixed criterion."""
    ground_truth: np.ndarray
    mode: str = "exact-rank"
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        self.ground_truth = np.asarray(self.ground_truth, dtype=np.float64)
        if not np.all(np.isfinite(self.ground_truth)):
            raise ValidationError("ground truth contains non-finite values")
        if self.mode not in ("exact-rank", "forced-binary", "noisy-rank"):
            raise ValidationError(f"unknown oracle mode {self.mode!r}")
        # the noisy ranker's internal criterion is fixed once, so repeated
        # queries stay mutually consistent
        g = np.random.default_rng(self.seed)
        self.internal = self.ground_truth + (
            self.sigma * g.normal(size=self.ground_truth.size)
            if self.mode == "noisy-rank" else 0.0)

    def restricted(self, subset):
        """The same simulated user, seen through a working subset."""
        out = OracleLabeler(self.ground_truth[subset], self.mode,
                            self.sigma, self.seed)
        out.internal = self.internal[subset]
        return out

    def labels_for(self, indices):
        """Label values in [-1, 1] for the queried items."""
        indices = np.asarray(indices)
        vals = self.internal[indices]
        if self.mode == "forced-binary":
            return np.where(vals >= 0, 1.0, -1.0)
        y = np.zeros(indices.size)
        if indices.size > 1:
            order = np.argsort(vals, kind="stable")
            y[order] = -1.0 + 2.0 * np.arange(indices.size) / (indices.size - 1)
        return y


@dataclass
class CurveResult:
    strategy: str
    series: list          # per trial: list of (n_labels, mae, tau)
    seeds: list

    def at(self, n_labels, what="mae"):
        col = {"mae": 1, "tau": 2}[what]
        out = []
        for trial in self.series:
            for row in trial:
                if row[0] == n_labels:
                    out.append(row[col])
        return np.asarray(out)

    def summary(self):
        """(n_labels, mae mean, mae std, tau mean, tau std) rows."""
        counts = sorted({row[0] for trial in self.series for row in trial})
        rows = []
        for c in counts:
            m, t = self.at(c, "mae"), self.at(c, "tau")
            rows.append((c, float(m.mean()), float(m.std()),
                         float(t.mean()), float(t.std())))
        return rows


def _restrict(H, subset):
    Hm = H.matrix if hasattr(H, "matrix") else H
    if subset is None:
        return Hm
    return Hm[subset][:, subset]


def init_curve_state(H, lam=1e-6, subset=None, with_u=False):
    """Zero-label inverses shared by all trials: C(0), and U(0) on demand."""
    Hs = _restrict(H, subset)
    Hd = Hs.toarray() if sp.issparse(Hs) else np.asarray(Hs, dtype=np.float64)
    C0 = np.linalg.inv(lam * Hd)
    U0 = np.linalg.inv(np.eye(Hd.shape[0]) + lam * Hd) if with_u else None
    return C0, U0


def run_learning_curve(H, oracle: OracleLabeler, strategy, trials=10,
                       start_labels=2, end_labels=50, record_at=None,
                       seeds=None, lam=1e-6, subset=None,
                       shared_state=None, basis=None):
    """Run `trials` simulated sessions of one selection strategy.

    record_at: label counts at which to solve and score; defaults to every
    count from start_labels to end_labels. seeds: per-trial seeds (default
    7000 + trial). subset: optional working-subset indices into H and the
    ground truth. shared_state: (C0, U0) from init_curve_state, reusable
    across strategies. basis: EigenBasis, required by info-gain-sparse.
    """
    if strategy not in STRATEGIES:
        raise ValidationError(f"unknown strategy {strategy!r}; "
                              f"expected one of {STRATEGIES}")
    Hm = H.matrix if hasattr(H, "matrix") else H
    if subset is not None:
        subset = np.asarray(subset)
        if subset.size != np.unique(subset).size:
            raise ValidationError("subset indices must be unique")
        if subset.size and (subset.min() < 0 or subset.max() >= Hm.shape[0]):
            raise ValidationError("subset index out of range")
    Hs = _restrict(H, subset)
    u = Hs.shape[0]
    if oracle.ground_truth.shape[0] != Hm.shape[0]:
        raise ValidationError("ground truth length does not match system")
    if not (2 <= start_labels < end_labels <= u):
        raise ValidationError("need 2 <= start_labels < end_labels <= u")
    record = tuple(record_at) if record_at else tuple(
        range(start_labels, end_labels + 1))
    if seeds is None:
        seeds = [7000 + t for t in range(trials)]
    if len(seeds) != trials:
        raise ValidationError("seed count must equal trial count")

    need_c = strategy in ("max-variance", "amershi", "info-gain")
    need_u = strategy == "amershi"
    if strategy == "info-gain-sparse":
        if basis is None:
            raise ValidationError("info-gain-sparse needs an eigenbasis")
        if basis.u != u:
            raise ValidationError("eigenbasis size does not match system")
        M0 = np.diag(1.0 / basis.eigenvalues)
    if need_c and shared_state is None:
        shared_state = init_curve_state(Hs, lam, None, with_u=need_u)
    C0, U0 = shared_state if shared_state is not None else (None, None)
    if need_u and U0 is None:
        raise ValidationError("amershi needs the U matrix in shared_state")

    ora = oracle if subset is None else oracle.restricted(subset)
    gt = ora.ground_truth
    gt_order = order_items(gt)
    cfg = SolverConfig(lam=lam)
    series = []
    for seed in seeds:
        g = np.random.default_rng(seed)
        C = C0.copy() if need_c else None
        U = U0.copy() if need_u else None
        M = M0.copy() if strategy == "info-gain-sparse" else None
        labeled = []

        def observe(i):
            if C is not None:
                c = C[:, i].copy()
                C[...] -= np.outer(c, c) / (1.0 + c[i])
            if U is not None:
                uc = U[:, i].copy()
                U[...] += np.outer(uc, uc) / (1.0 - uc[i])
            if M is not None:
                b = basis.E[i, :]
                Mb = M @ b
                M[...] -= np.outer(Mb, Mb) / (1.0 + b @ Mb)
            labeled.append(int(i))

        for i in g.choice(u, start_labels, replace=False):
            observe(i)
        rows = []
        while True:
            n = len(labeled)
            if n in record:
                lab = np.asarray(labeled)
                y = np.zeros(u)
                y[lab] = ora.labels_for(lab)
                ind = np.zeros(u, dtype=bool)
                ind[lab] = True
                f = solve(Hs, LabelAssignment(y, ind), cfg).f[0]
                rows.append((n, mae(f, gt, scale_free=True),
                             kendall_tau(order_items(f), gt_order)))
            if n >= end_labels:
                break
            mask = np.ones(u, dtype=bool)
            mask[labeled] = False
            cand = np.flatnonzero(mask)
            if strategy == "random":
                i = g.choice(cand)
            elif strategy == "max-variance":
                i = cand[np.argmax(C[cand, cand])]
            elif strategy == "info-gain":
                gains = (C[:, cand] ** 2).sum(axis=0) / (1.0 + C[cand, cand])
                i = cand[np.argmax(gains)]
            elif strategy == "info-gain-sparse":
                B = basis.E[cand, :]
                MB = B @ M
                gains = (MB ** 2).sum(axis=1) / (1.0 + (MB * B).sum(axis=1))
                i = cand[np.argmax(gains)]
            else:   # amershi
                ud = U[cand, cand]
                loo = ud / (1.0 - ud)
                i = cand[np.argmax(C[cand, cand] / loo)]
            observe(i)
        series.append(rows)
    return CurveResult(strategy, series, list(seeds))


def export_curves_csv(path, results, summary_path=None):
    """Per-trial rows, plus an optional mean/std summary per label count."""
    results = list(results)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["strategy", "trial", "seed", "n_labels", "mae", "tau"])
        for res in results:
            for t, (trial, seed) in enumerate(zip(res.series, res.seeds)):
                for n, m, tau in trial:
                    w.writerow([res.strategy, t, seed, n,
                                repr(float(m)), repr(float(tau))])
    if summary_path is not None:
        with open(summary_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["strategy", "n_labels", "mae_mean", "mae_std",
                        "tau_mean", "tau_std"])
            for res in results:
                for c, mm, ms, tm, tsd in res.summary():
                    w.writerow([res.strategy, c, repr(mm), repr(ms),
                                repr(tm), repr(tsd)])
