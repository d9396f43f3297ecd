"""Hot-kernel dispatch: compiled extension when available, NumPy otherwise.

Set ADVDENS_KERNELS=numpy to force the reference backend, =cython to
require the extension (ImportError if it was not built).  The default
(auto) prefers the extension and silently falls back.
"""

from __future__ import annotations

import os

import numpy as np

from . import _ref
from ._ref import cosine_features

_choice = os.environ.get("ADVDENS_KERNELS", "auto")
_fast = None
if _choice in ("auto", "cython"):
    try:
        from . import _fastk as _fast
    except ImportError:
        if _choice == "cython":
            raise
        _fast = None
elif _choice != "numpy":
    raise ValueError(f"ADVDENS_KERNELS must be auto|cython|numpy, got {_choice!r}")

BACKEND = "cython" if _fast is not None else "numpy"


def empirical_coeff_tensor(points: np.ndarray, band: int) -> np.ndarray:
    """Mean over samples of the tensor-product basis; shape (band+1,)*d."""
    pts = np.ascontiguousarray(points, dtype=np.float64)
    n, d = pts.shape
    if _fast is not None and d == 1:
        partials = _fast.coeff_partials_1d(pts[:, 0], band, _fast.N_CHUNKS)
        return partials.sum(axis=0) / n
    if _fast is not None and d == 2:
        partials = _fast.coeff_partials_2d(pts, band, _fast.N_CHUNKS)
        return partials.sum(axis=0) / n
    return _ref.empirical_coeff_tensor(pts, band)


def eval_coeff_tensor(coeffs: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Evaluate sum_xi theta_xi psi_xi(x) at each row of points."""
    pts = np.ascontiguousarray(points, dtype=np.float64)
    d = pts.shape[1]
    cf = np.ascontiguousarray(coeffs, dtype=np.float64)
    if _fast is not None and d == 1:
        return _fast.eval_series_1d(cf, pts[:, 0])
    if _fast is not None and d == 2:
        return _fast.eval_series_2d(cf, pts, _fast.N_CHUNKS)
    return _ref.eval_coeff_tensor(cf, pts)
