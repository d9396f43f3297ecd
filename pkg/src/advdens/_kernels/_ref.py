"""NumPy reference implementation of the cosine-series hot kernels.

The basis on [0,1] is psi_0(t) = 1, psi_k(t) = sqrt(2) cos(pi k t); in d
dimensions basis functions are tensor products indexed by multi-indices in
[0..band]^d.  The two operations below dominate Monte Carlo runtime:

* ``empirical_coeff_tensor`` -- per-index sample averages of the basis,
  i.e. the raw spectral coefficients of the empirical measure;
* ``eval_coeff_tensor`` -- pointwise evaluation of a coefficient tensor.
"""

from __future__ import annotations

import numpy as np

SQRT2 = np.sqrt(2.0)

_CHUNK = 4096  # sample chunk for the generic-d einsum path


def cosine_features(x: np.ndarray, band: int) -> np.ndarray:
    """Feature matrix [psi_k(x_j)]_{j,k} of shape (n, band+1) for 1-d x."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    k = np.arange(band + 1, dtype=np.float64)
    feats = np.cos(np.pi * x[:, None] * k[None, :])
    feats[:, 1:] *= SQRT2
    feats[:, 0] = 1.0
    return feats


def empirical_coeff_tensor(points: np.ndarray, band: int) -> np.ndarray:
    pts = np.ascontiguousarray(points, dtype=np.float64)
    n, d = pts.shape
    if d == 1:
        return cosine_features(pts[:, 0], band).mean(axis=0)
    if d == 2:
        fa = cosine_features(pts[:, 0], band)
        fb = cosine_features(pts[:, 1], band)
        return np.einsum("ja,jb->ab", fa, fb) / n
    shape = (band + 1,) * d
    acc = np.zeros(shape)
    letters = [chr(ord("a") + i) for i in range(d)]
    spec = ",".join(f"j{c}" for c in letters) + "->" + "".join(letters)
    for lo in range(0, n, _CHUNK):
        chunk = pts[lo : lo + _CHUNK]
        feats = [cosine_features(chunk[:, i], band) for i in range(d)]
        acc += np.einsum(spec, *feats, optimize=True)
    return acc / n


def eval_coeff_tensor(coeffs: np.ndarray, points: np.ndarray) -> np.ndarray:
    pts = np.ascontiguousarray(points, dtype=np.float64)
    n, d = pts.shape
    band = coeffs.shape[0] - 1
    if d == 1:
        return cosine_features(pts[:, 0], band) @ coeffs
    if d == 2:
        fa = cosine_features(pts[:, 0], band)
        fb = cosine_features(pts[:, 1], band)
        return np.einsum("ja,ab,jb->j", fa, coeffs, fb, optimize=True)
    letters = [chr(ord("a") + i) for i in range(d)]
    spec = ",".join(f"j{c}" for c in letters) + "," + "".join(letters) + "->j"
    out = np.empty(n)
    for lo in range(0, n, _CHUNK):
        chunk = pts[lo : lo + _CHUNK]
        feats = [cosine_features(chunk[:, i], band) for i in range(d)]
        out[lo : lo + _CHUNK] = np.einsum(spec, *feats, coeffs, optimize=True)
    return out
