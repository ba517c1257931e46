"""Synthetic benchmark data: a curved 2-manifold embedded in high dimension.

Points are drawn on a unit square of latent coordinates, mapped through a
random linear embedding plus a few cosine bumps so the sheet is genuinely
curved, then perturbed with ambient noise. Ground truth is the first latent
coordinate rescaled to [-1, 1].

Optional ingredients used by the evaluation harness:

* planted outliers, displaced far off the sheet along random directions,
  with (optionally) scrambled ground truth so labeling one is wasted budget;
* a noise strip, a band of the sheet whose ambient noise is amplified, so
  locally predicting points there is harder than elsewhere.
"""
import numpy as np


def make_manifold(u, d=50, seed=0, n_outliers=0, outlier_scale=8.0,
                  noise=0.01, scramble_outliers=False, noise_strip=None,
                  n_waves=8, wave_amp=0.8):
    """Build (X, ground_truth, outlier_indices).

    Parameters
    ----------
    u, d : item count and ambient dimension.
    seed : generator seed; everything here is drawn from one stream.
    n_outliers : number of points displaced off the manifold.
    outlier_scale : displacement in units of the ambient cloud scale.
    noise : per-coordinate ambient noise level.
    scramble_outliers : replace outlier ground truth with uniform noise.
    noise_strip : optional (lo, hi, mult); latent t0 in [lo, hi] gets its
        ambient noise multiplied by mult.
    n_waves, wave_amp : number and amplitude of the cosine bumps.

    Returns X as float32 (u, d), ground truth float64 (u,), and the int
    index array of planted outliers (possibly empty).
    """
    g = np.random.default_rng(seed)
    t = g.uniform(0, 1, (u, 2))
    B = g.normal(size=(2, d))
    W = g.uniform(0.5, 1.5, size=(2, n_waves)) * g.choice([-1, 1], size=(2, n_waves))
    ph = g.uniform(0, 2 * np.pi, n_waves)
    A = g.normal(size=(n_waves, d)) / np.sqrt(n_waves)
    X = t @ B + wave_amp * np.cos(2 * np.pi * (t @ W) + ph) @ A
    nz = noise * g.normal(size=X.shape)
    if noise_strip is not None:
        lo, hi, mult = noise_strip
        nz[(t[:, 0] >= lo) & (t[:, 0] <= hi)] *= mult
    X += nz
    gt = 2 * t[:, 0] - 1
    out_idx = np.array([], dtype=int)
    if n_outliers:
        out_idx = g.choice(u, n_outliers, replace=False)
        scale = np.linalg.norm(X.std(axis=0))
        dirs = g.normal(size=(n_outliers, d))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        X[out_idx] += outlier_scale * scale * dirs
        if scramble_outliers:
            gt[out_idx] = g.uniform(-1, 1, n_outliers)
    return X.astype(np.float32), gt, out_idx


def make_chain(n, d=1, spacing=1.0):
    """n points on a line in d dimensions; the simplest solvable geometry."""
    x = np.zeros((n, d), dtype=np.float32)
    x[:, 0] = spacing * np.arange(n)
    return x
