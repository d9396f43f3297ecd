"""Samplers for spectral densities and the Gaussian sequence model.

All samplers are pure functions of (field, n, seed): Philox streams keyed
by the seed make runs bit-reproducible and safe to parallelise.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import _kernels
from ._seeds import make_rng
from .spectral import CoefficientField, abs_coeff_tail_sum, density_eval, sup_envelope


@dataclass(frozen=True)
class SampleSet:
    """n points in [0,1]^d with the provenance needed to reproduce them."""

    dim: int
    points: np.ndarray
    seed: int
    source: str

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise ValueError(f"points must have shape (n, {self.dim})")
        if pts.shape[0] < 1:
            raise ValueError("need at least one sample")
        if pts.min() < 0.0 or pts.max() > 1.0:
            raise ValueError("samples must lie in [0,1]^d")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def to_csv(self, path) -> None:
        """CSV with header x1..xd plus a .json sidecar {seed, n, source}."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"x{i + 1}" for i in range(self.dim)])
            for row in self.points:
                writer.writerow([repr(float(v)) for v in row])
        with open(str(path) + ".json", "w") as fh:
            json.dump({"seed": self.seed, "n": self.n, "source": self.source}, fh)

    @classmethod
    def from_csv(cls, path) -> "SampleSet":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = [[float(v) for v in row] for row in reader]
        pts = np.asarray(rows)
        try:
            with open(str(path) + ".json") as fh:
                meta = json.load(fh)
        except FileNotFoundError:
            meta = {"seed": -1, "source": "unknown"}
        return cls(len(header), pts, int(meta.get("seed", -1)), str(meta.get("source", "unknown")))


@dataclass(frozen=True)
class RejectionResult:
    sample_set: SampleSet
    acceptance_rate: float
    proposals: int


def rejection_sample(field: CoefficientField, n: int, seed: int) -> RejectionResult:
    """n i.i.d. draws from a spectral density by uniform-envelope rejection.

    The envelope is the closed-form sup bound
    1 + 2^{d/2} sum_{xi != 0} |theta_xi|; densities built by
    ``synth_density`` keep it below 2 - positivity_floor so the acceptance
    rate (= 1/envelope) stays useful.
    """
    if field.kind != "density":
        raise ValueError("rejection_sample requires a density field")
    if n < 1:
        raise ValueError("n must be >= 1")
    envelope = sup_envelope(field)
    if envelope <= 0:
        raise ValueError("non-positive envelope; density field is broken")
    rng = make_rng("rejection", seed)
    d = field.dim
    accepted = []
    total_props = 0
    have = 0
    while have < n:
        batch = min(int(1.2 * (n - have) * envelope) + 16, 2_000_000)
        props = rng.random((batch, d))
        u = rng.random(batch)
        vals = _kernels.eval_coeff_tensor(field.coeffs, props)
        keep = props[u * envelope < vals]
        accepted.append(keep)
        total_props += batch
        have += keep.shape[0]
    pts = np.concatenate(accepted, axis=0)[:n]
    sample = SampleSet(d, pts, seed, f"rejection(band={field.band})")
    return RejectionResult(sample, have / total_props, total_props)


def cdf_1d(field: CoefficientField, x: np.ndarray) -> np.ndarray:
    """Exact CDF of a 1-d spectral density via the closed antiderivative."""
    if field.dim != 1:
        raise ValueError("cdf_1d requires dim 1")
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    theta = field.coeffs
    out = field.theta0 * x
    k = np.arange(1, field.band + 1, dtype=np.float64)
    if k.size:
        # integral of sqrt(2) cos(pi k t) from 0 to x
        out = out + (np.sin(np.pi * np.outer(x, k)) * (np.sqrt(2.0) / (np.pi * k))) @ theta[1:]
    return out


def inverse_cdf_sample_1d(
    field: CoefficientField, n: int, seed: int, grid_bits: int = 14
) -> SampleSet:
    """Inverse-CDF draws on a cached 2^grid_bits grid (dim 1 only).

    The CDF values are exact (closed-form antiderivative of the cosine
    series); the inverse is monotone PCHIP interpolation, so acceptance
    rates never matter even for sharply peaked densities.
    """
    if field.dim != 1:
        raise ValueError("inverse-CDF sampling is 1-d only")
    grid = np.linspace(0.0, 1.0, 2**grid_bits + 1)
    cdf = cdf_1d(field, grid)
    cdf[0], cdf[-1] = 0.0, 1.0
    if np.any(np.diff(cdf) <= 0):
        raise ValueError("density not strictly positive; inverse CDF undefined")
    inv = PchipInterpolator(cdf, grid)
    rng = make_rng("inverse-cdf", seed)
    pts = np.clip(inv(rng.random(n)), 0.0, 1.0)
    return SampleSet(1, pts.reshape(-1, 1), seed, f"inverse-cdf(band={field.band})")


@dataclass(frozen=True)
class GaussianSequenceObservation:
    """Noisy coefficients Y_xi = theta_xi + n^{-1/2} Z_xi over the band."""

    dim: int
    band: int
    y: np.ndarray
    n: int
    seed: int

    def __post_init__(self):
        arr = np.array(self.y, dtype=np.float64)
        arr.flags.writeable = False
        object.__setattr__(self, "y", arr)


def gaussian_sequence_observe(
    field: CoefficientField, n: int, seed: int
) -> GaussianSequenceObservation:
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = make_rng("gaussian-sequence", seed)
    z = rng.standard_normal(field.coeffs.shape)
    y = field.coeffs + z / np.sqrt(n)
    return GaussianSequenceObservation(field.dim, field.band, y, n, seed)
