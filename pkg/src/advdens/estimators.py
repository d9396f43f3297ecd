"""Spectral plug-in estimators of a density from i.i.d. samples.

The raw (empirical) estimator keeps every sample-average coefficient up to
a band cap K; the smoothed estimator additionally zeroes every multi-index
whose largest coordinate exceeds a cutoff M.  Balancing the variance of
the retained block against the dual-norm bias of the discarded tail gives
the cutoff schedule M ~ n^{1/(2(alpha+beta)+d)} and the error bound

    L_beta sqrt(C M^d / n) + L_alpha L_beta M^{-(alpha+beta)}

where alpha is the density smoothness, beta the discriminator smoothness,
and C bounds the second moment of any basis function (C = 2^d for the
cosine basis).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from . import _kernels
from .sampling import SampleSet
from .spectral import CoefficientField


def empirical_coeffs(s: SampleSet, K: int) -> CoefficientField:
    """Sample-average coefficients over the full band cube [0..K]^d."""
    if K < 0:
        raise ValueError("band cap K must be >= 0")
    tensor = _kernels.empirical_coeff_tensor(s.points, K)
    tensor = np.array(tensor)
    tensor.flat[0] = 1.0  # psi_0 == 1, so the average is 1 by construction
    return CoefficientField(s.dim, K, "signed-measure", tensor)


def smoothed_estimator(s: SampleSet, M: int, K: int) -> CoefficientField:
    """Empirical coefficients for ||xi||_inf <= M, exact zero up to K."""
    if M > K:
        raise ValueError(f"cutoff M={M} exceeds band cap K={K}")
    if M < 0:
        raise ValueError("cutoff M must be >= 0")
    low = _kernels.empirical_coeff_tensor(s.points, M)
    arr = np.zeros((K + 1,) * s.dim)
    arr[tuple(slice(0, M + 1) for _ in range(s.dim))] = low
    arr.flat[0] = 1.0
    return CoefficientField(s.dim, K, "signed-measure", arr)


def optimal_cutoff(n: int, alpha: float, beta: float, d: int, c: float = 1.0) -> int:
    """round(c * n^{1/(2(alpha+beta)+d)}), floored at 1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if alpha + beta <= 0:
        raise ValueError("alpha + beta must be positive")
    raw = c * n ** (1.0 / (2.0 * (alpha + beta) + d))
    return max(1, int(math.floor(raw + 0.5)))


def bias_variance_bound(
    n: int, M: int, d: int, L_alpha: float, L_beta: float, alpha: float, beta: float, C: float
) -> float:
    if M < 1 or n < 1 or C <= 0:
        raise ValueError("need M >= 1, n >= 1, C > 0")
    variance = L_beta * math.sqrt(C * M**d / n)
    bias = L_alpha * L_beta * M ** (-(alpha + beta))
    return variance + bias


# --- kernel density alternative (1-d) --------------------------------------

# smooth bump supported on |x| < 1/2
def _bump_raw(u):
    u = np.asarray(u, dtype=np.float64)
    out = np.zeros_like(u)
    inside = np.abs(u) < 0.5
    ui = u[inside]
    out[inside] = np.exp(-1.0 / (1.0 - 4.0 * ui**2))
    return out


@functools.lru_cache(maxsize=1)
def _bump_mass() -> float:
    val, _ = quad(lambda t: math.exp(-1.0 / (1.0 - 4.0 * t * t)), -0.5, 0.5, epsabs=1e-13)
    return val


def bump_kernel(u, a: float | None = None) -> np.ndarray:
    """K(u) = a exp(-1/(1-4u^2)) on |u| < 1/2; default a makes it integrate to 1."""
    if a is None:
        a = 1.0 / _bump_mass()
    return a * _bump_raw(u)


def _kde_eval(data: np.ndarray, h: float, x: np.ndarray) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    out = np.zeros_like(x)
    chunk = max(1, int(2e6 / max(1, data.size)))
    for lo in range(0, x.size, chunk):
        xs = x[lo : lo + chunk, None]
        acc = bump_kernel((xs - data[None, :]) / h)
        acc += bump_kernel((xs + data[None, :]) / h)  # reflect at 0
        acc += bump_kernel((xs - 2.0 + data[None, :]) / h)  # reflect at 1
        out[lo : lo + chunk] = acc.sum(axis=1)
    return out / (data.size * h)


@dataclass(frozen=True)
class KdeEstimate:
    """Boundary-reflected bump KDE plus its band projection."""

    sample: SampleSet
    h: float
    field: CoefficientField

    def __call__(self, x) -> np.ndarray:
        return _kde_eval(self.sample.points[:, 0], self.h, x)


def kde_estimator(s: SampleSet, h: float, band: int) -> KdeEstimate:
    """1-d bump-kernel density estimate with mass-preserving reflection.

    The evaluator is (1/(nh)) sum_j K((x - X_j)/h) plus the mirror images
    of each X_j at both endpoints, which restores the probability mass the
    raw kernel would leak outside [0,1].  The projected coefficients are
    computed by composite Gauss-Legendre quadrature against the basis.
    """
    if s.dim != 1:
        raise ValueError("kde_estimator is 1-d only")
    if not 0.0 < h < 0.5:
        raise ValueError("bandwidth h must be in (0, 0.5)")
    panels = max(64, int(8.0 / h))
    nodes, weights = np.polynomial.legendre.leggauss(16)
    edges = np.linspace(0.0, 1.0, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1] - edges[0])
    xs = (mid[:, None] + half * nodes[None, :]).ravel()
    ws = np.tile(half * weights, panels)
    fx = _kde_eval(s.points[:, 0], h, xs)
    feats = _kernels.cosine_features(xs, band)
    theta = feats.T @ (ws * fx)
    theta[0] = 1.0
    return KdeEstimate(s, h, CoefficientField(1, band, "signed-measure", theta))
