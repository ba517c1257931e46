"""Local-model regularizer assembly, plus the graph-Laplacian baseline.

The regularizer H is a sparse symmetric positive-definite matrix. Each
point contributes one squared-residual term: its value minus a weighted
prediction from its k neighbors, scaled by the predictive variance of the
local model that produced the weights,

    H = sum_i (e_i - w_i)(e_i - w_i)^T / sigma2_i + epsilon * I

where w_i is scattered to full index space. The weights come from a small
Gaussian-process regression fitted per point in local principal-component
coordinates.

Kernel choice. A pure Gaussian kernel gives weights that do not reproduce
affine functions (their sum is not 1), which injects spurious growth modes
into H's near-null space and visibly corrupts propagated values on curved
sheets. The kernel used here is the Gaussian plus a scaled linear-trend
term,

    K(a, b) = exp(-|a - b|^2 / 2) + trend_scale^2 * (1 + a.b)

in bandwidth-normalized coordinates. The trend term makes the local model
exact on affine functions as trend_scale grows, while keeping it finite
bounds extrapolation at points far from their neighborhood (displaced
outliers), so their predictive variance stays large but their predicted
value does not explode.

The Laplacian baseline S = D - W on the symmetrized k-NN graph with a
global-bandwidth Gaussian edge weight is assembled for comparison; on
high-dimensional data its propagated values collapse toward zero away from
labels, which is the failure mode H exists to avoid.
"""
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import ValidationError
from .neighbors import NeighborGraph
from .validation import check_positive

CACHE_MAGIC = b"CSRG"
CACHE_VERSION = 1


@dataclass
class ManifoldConfig:
    """Knobs of the local-model construction.

    k : neighbor count (>= 2).
    m : local intrinsic dimension kept after the per-point PCA.
    bandwidth_mode : "mean-distance" scales each neighborhood by its mean
        neighbor distance; "fixed" uses the given bandwidth everywhere.
    bandwidth : bandwidth for the fixed mode.
    noise : local model noise floor (ridge and variance clamp).
    trend_scale : prior scale of the local affine trend, see module docs.
    epsilon_scale : diagonal ridge, as a fraction of mean(diag(H)).
    """
    k: int = 20
    m: int = 10
    bandwidth_mode: str = "mean-distance"
    bandwidth: float = 1.0
    noise: float = 1e-2
    trend_scale: float = 2.0
    epsilon_scale: float = 1e-9

    def __post_init__(self):
        if self.k < 2:
            raise ValidationError(f"k must be >= 2, got {self.k}")
        if not (1 <= self.m <= self.k):
            raise ValidationError(f"m must lie in [1, k], got m={self.m}")
        if self.bandwidth_mode not in ("mean-distance", "fixed"):
            raise ValidationError(f"unknown bandwidth_mode {self.bandwidth_mode!r}")
        check_positive(self.noise, "noise")
        check_positive(self.trend_scale, "trend_scale")
        check_positive(self.epsilon_scale, "epsilon_scale")


@dataclass
class LocalModels:
    """Per-point prediction weights over the k neighbors, and variances."""
    weights: np.ndarray   # (u, k)
    sigma2: np.ndarray    # (u,), all > 0

    def __len__(self):
        return self.weights.shape[0]


@dataclass
class RegularizerMatrix:
    matrix: sp.csr_matrix   # symmetric PD, u x u
    epsilon: float
    k: int = 0
    m: int = 0

    @property
    def u(self):
        return self.matrix.shape[0]


def build_local_models(F, graph: NeighborGraph, cfg: ManifoldConfig):
    """Fit the per-point local model for every item.

    For point i: stack i with its neighbors, center the cloud, project onto
    its top-m principal directions, rescale by the bandwidth, then solve the
    kernel system (K + noise I) w = k_* for the prediction weights and take
    sigma2 = k_** - k_*^T w + noise, clamped below at noise. A degenerate
    neighborhood (zero bandwidth) falls back to uniform weights and
    sigma2 = noise.
    """
    X = np.asarray(F, dtype=np.float64)
    nbr, dist = graph.neighbors, graph.distances
    u, k = nbr.shape
    m_eff = min(cfg.m, X.shape[1])
    t2 = cfg.trend_scale ** 2
    noise = cfg.noise
    weights = np.zeros((u, k))
    sigma2 = np.zeros(u)
    eye = noise * np.eye(k)
    for i in range(u):
        cloud = np.vstack([X[i], X[nbr[i]]])
        Z = cloud - cloud.mean(axis=0)
        if cfg.bandwidth_mode == "fixed":
            h = cfg.bandwidth
        else:
            h = dist[i].mean()
        if h <= 0:
            weights[i] = 1.0 / k
            sigma2[i] = noise
            continue
        _, sv, Vt = np.linalg.svd(Z, full_matrices=False)
        keep = max(1, min(m_eff, int((sv > 1e-10 * sv[0]).sum())))
        proj = (Z @ Vt[:keep].T) / h
        xp, nbp = proj[0], proj[1:]
        d2 = ((nbp[:, None, :] - nbp[None, :, :]) ** 2).sum(-1)
        K = np.exp(-d2 / 2.0) + t2 * (1.0 + nbp @ nbp.T)
        ks = np.exp(-((nbp - xp) ** 2).sum(-1) / 2.0) + t2 * (1.0 + nbp @ xp)
        kss = 1.0 + t2 * (1.0 + xp @ xp)
        w = np.linalg.solve(K + eye, ks)
        weights[i] = w
        sigma2[i] = max(noise, kss - ks @ w + noise)
    return LocalModels(weights, sigma2)


def assemble_regularizer(models: LocalModels, graph: NeighborGraph,
                         epsilon_scale=1e-9):
    """Sum the per-point residual outer products into sparse H, plus ridge.

    Assembly order is fixed (by item index) and duplicate coordinates are
    summed by the sparse conversion, so outputs are bit-stable.
    """
    nbr = graph.neighbors
    u, k = nbr.shape
    idx = np.concatenate([np.arange(u)[:, None], nbr], axis=1)   # (u, k+1)
    v = np.concatenate([np.ones((u, 1)), -models.weights], axis=1)
    outer = v[:, :, None] * v[:, None, :] / models.sigma2[:, None, None]
    rows = np.repeat(idx, k + 1, axis=1).ravel()
    cols = np.tile(idx, (1, k + 1)).ravel()
    H = sp.coo_matrix((outer.ravel(), (rows, cols)), shape=(u, u)).tocsr()
    eps = epsilon_scale * (H.diagonal().sum() / u)
    H = (H + eps * sp.eye(u, format="csr")).sorted_indices()
    return RegularizerMatrix(H, eps, k=graph.k, m=0)


def build_regularizer(F, graph: NeighborGraph, cfg: ManifoldConfig):
    """build_local_models + assemble_regularizer in one call."""
    models = build_local_models(F, graph, cfg)
    reg = assemble_regularizer(models, graph, cfg.epsilon_scale)
    reg.m = cfg.m
    return reg


def build_graph_laplacian(F, graph: NeighborGraph, epsilon_scale=1e-9):
    """Unnormalized Laplacian S = D - W on the symmetrized k-NN graph.

    Edge weights are Gaussian in distance with one global bandwidth, the
    mean squared neighbor distance; the same epsilon ridge as H keeps S
    positive definite.
    """
    X = np.asarray(F, dtype=np.float64)
    nbr = graph.neighbors
    u, k = nbr.shape
    rows = np.repeat(np.arange(u), k)
    cols = nbr.ravel()
    d2 = ((X[rows] - X[cols]) ** 2).sum(axis=1)
    h2 = d2.mean()
    if h2 <= 0:
        w = np.ones_like(d2)
    else:
        w = np.exp(-d2 / (2.0 * h2))
    W = sp.coo_matrix((w, (rows, cols)), shape=(u, u)).tocsr()
    W = W.maximum(W.T)
    S = sp.diags(np.asarray(W.sum(axis=1)).ravel()) - W
    eps = epsilon_scale * (S.diagonal().sum() / u)
    S = (S + eps * sp.eye(u)).tocsr().sorted_indices()
    return RegularizerMatrix(S, eps, k=graph.k, m=0)


def save_regularizer(path, reg: RegularizerMatrix):
    """Cache H in a flat binary layout.

    magic "CSRG" | u32 version | u64 u, k, m | f64 epsilon
    | (u+1) x u64 row offsets | nnz x u64 column indices | nnz x f64 values
    """
    H = reg.matrix.tocsr().sorted_indices()
    with open(path, "wb") as fh:
        fh.write(struct.pack("<4sIQQQd", CACHE_MAGIC, CACHE_VERSION,
                             H.shape[0], reg.k, reg.m, reg.epsilon))
        fh.write(H.indptr.astype("<u8").tobytes())
        fh.write(H.indices.astype("<u8").tobytes())
        fh.write(H.data.astype("<f8").tobytes())


def load_regularizer(path):
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"regularizer cache not found: {path}")
    raw = path.read_bytes()
    head = struct.Struct("<4sIQQQd")
    if len(raw) < head.size:
        raise ValidationError(f"regularizer cache truncated: {path}")
    magic, version, u, k, m, eps = head.unpack_from(raw)
    if magic != CACHE_MAGIC:
        raise ValidationError(f"bad magic in {path}: {magic!r}")
    if version != CACHE_VERSION:
        raise ValidationError(f"unsupported cache version {version}")
    off = head.size
    indptr = np.frombuffer(raw, dtype="<u8", count=u + 1, offset=off)
    off += indptr.nbytes
    nnz = int(indptr[-1])
    indices = np.frombuffer(raw, dtype="<u8", count=nnz, offset=off)
    off += indices.nbytes
    data = np.frombuffer(raw, dtype="<f8", count=nnz, offset=off)
    if off + data.nbytes != len(raw):
        raise ValidationError(f"regularizer cache size mismatch: {path}")
    H = sp.csr_matrix((data.copy(), indices.astype(np.int64),
                       indptr.astype(np.int64)), shape=(u, u))
    return RegularizerMatrix(H, float(eps), k=int(k), m=int(m))
