"""Cosine-basis spectral representation of functions on the unit cube.

Basis and conventions
---------------------
Base measure: uniform on [0,1]^d.  One-dimensional basis psi_0(t) = 1,
psi_k(t) = sqrt(2) cos(pi k t) for k >= 1; d-dimensional basis functions
are tensor products psi_xi(x) = prod_i psi_{xi_i}(x_i) over multi-indices
xi in N^d.  The family is orthonormal in L2([0,1]^d) and uniformly bounded
by 2^{d/2}.

A function g(x) = sum_xi theta_xi psi_xi(x) is stored as a dense
coefficient tensor over the band cube [0..B]^d (row-major multi-index
order when flattened).  Sobolev smoothness is expressed through ellipsoid
weights w_xi = (1 + sum_i xi_i^2)^alpha: the ellipsoid of smoothness alpha
and radius L is { theta : sum_xi w_xi theta_xi^2 <= L^2 }.
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._seeds import make_rng

KINDS = ("density", "signed-measure", "discriminator")

SQRT2 = math.sqrt(2.0)


@functools.lru_cache(maxsize=128)
def sq_norm_grid(dim: int, band: int) -> np.ndarray:
    """Tensor of ||xi||_2^2 over the band cube, shape (band+1,)*dim."""
    axes = np.indices((band + 1,) * dim)
    grid = np.sum(axes.astype(np.float64) ** 2, axis=0)
    grid.flags.writeable = False
    return grid


@functools.lru_cache(maxsize=128)
def max_index_grid(dim: int, band: int) -> np.ndarray:
    """Tensor of ||xi||_inf over the band cube."""
    axes = np.indices((band + 1,) * dim)
    grid = np.max(axes, axis=0)
    grid.flags.writeable = False
    return grid


def ellipsoid_weights(dim: int, band: int, alpha: float) -> np.ndarray:
    return (1.0 + sq_norm_grid(dim, band)) ** alpha


@dataclass(frozen=True)
class SobolevEllipsoid:
    """Smoothness/radius pair defining a coefficient ellipsoid."""

    alpha: float
    radius: float

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("smoothness alpha must be >= 0")
        if self.radius <= 0:
            raise ValueError("radius must be > 0")

    def weight(self, xi) -> float:
        xi = np.asarray(xi, dtype=np.float64)
        return float((1.0 + np.sum(xi**2)) ** self.alpha)

    def contains(self, field: "CoefficientField", tol: float = 0.0) -> bool:
        return ellipsoid_norm(field, self.alpha) <= self.radius + tol


@dataclass(frozen=True)
class CoefficientField:
    """Dense coefficient tensor over [0..band]^dim.

    kind is one of "density" (theta_0 = 1, represents a probability
    density against the uniform base measure), "signed-measure", or
    "discriminator".  Instances are immutable; the coefficient array is
    copied on construction and marked read-only.
    """

    dim: int
    band: int
    kind: str
    coeffs: np.ndarray

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.band < 0:
            raise ValueError("band must be >= 0")
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        arr = np.array(self.coeffs, dtype=np.float64)
        shape = (self.band + 1,) * self.dim
        if arr.size != (self.band + 1) ** self.dim:
            raise ValueError(f"expected {(self.band + 1) ** self.dim} coefficients, got {arr.size}")
        arr = arr.reshape(shape)
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        if self.kind == "density" and arr.flat[0] != 1.0:
            raise ValueError("density fields require theta_0 = 1")
        arr.flags.writeable = False
        object.__setattr__(self, "coeffs", arr)

    @property
    def theta0(self) -> float:
        return float(self.coeffs.flat[0])

    def __getitem__(self, xi) -> float:
        xi = tuple(int(v) for v in np.atleast_1d(xi))
        if len(xi) != self.dim:
            raise ValueError(f"multi-index length {len(xi)} != dim {self.dim}")
        return float(self.coeffs[xi])

    def zero_pad(self, band: int) -> "CoefficientField":
        """Embed into a larger band cube (identity if band is unchanged)."""
        if band < self.band:
            raise ValueError("zero_pad target band smaller than current band")
        if band == self.band:
            return self
        arr = np.zeros((band + 1,) * self.dim)
        arr[tuple(slice(0, self.band + 1) for _ in range(self.dim))] = self.coeffs
        return CoefficientField(self.dim, band, self.kind, arr)

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "band": self.band,
            "kind": self.kind,
            "coeffs": [float(v) for v in self.coeffs.ravel(order="C")],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "CoefficientField":
        return cls(int(data["dim"]), int(data["band"]), data["kind"], np.asarray(data["coeffs"]))

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def loads(cls, text: str) -> "CoefficientField":
        return cls.from_json_dict(json.loads(text))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path) -> "CoefficientField":
        with open(path) as fh:
            return cls.loads(fh.read())


def uniform_density(dim: int, band: int = 0) -> CoefficientField:
    arr = np.zeros((band + 1,) * dim)
    arr.flat[0] = 1.0
    return CoefficientField(dim, band, "density", arr)


def basis_eval(xi, x) -> float:
    """Evaluate psi_xi at a single point x in [0,1]^d."""
    xi = np.atleast_1d(np.asarray(xi, dtype=np.int64))
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if xi.shape != x.shape:
        raise ValueError(f"multi-index shape {xi.shape} != point shape {x.shape}")
    value = 1.0
    for k, t in zip(xi, x):
        if k > 0:
            value *= SQRT2 * math.cos(math.pi * k * t)
    return value


def ellipsoid_norm(field: CoefficientField, alpha: float) -> float:
    """Weighted l2 norm sqrt(sum_xi (1+||xi||^2)^alpha theta_xi^2)."""
    w = ellipsoid_weights(field.dim, field.band, alpha)
    return float(np.sqrt(np.sum(w * field.coeffs**2)))


def density_eval(field: CoefficientField, x):
    """Evaluate the spectral expansion at x.

    x may be a scalar (dim 1), a length-d point, or an (n, d) batch; the
    return matches (float or length-n array).
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 0:
        if field.dim != 1:
            raise ValueError("scalar point only valid for dim 1")
        pts, single = arr.reshape(1, 1), True
    elif arr.ndim == 1:
        if arr.shape[0] == field.dim:
            pts, single = arr.reshape(1, field.dim), True
        elif field.dim == 1:
            pts, single = arr.reshape(-1, 1), False
        else:
            raise ValueError(f"point of length {arr.shape[0]} does not match dim {field.dim}")
    elif arr.ndim == 2:
        if arr.shape[1] != field.dim:
            raise ValueError(f"points have dim {arr.shape[1]}, field has dim {field.dim}")
        pts, single = arr, False
    else:
        raise ValueError("x must be scalar, (d,), or (n, d)")
    vals = _kernels.eval_coeff_tensor(field.coeffs, pts)
    return float(vals[0]) if single else vals


def abs_coeff_tail_sum(field: CoefficientField) -> float:
    """sum_{xi != 0} |theta_xi|, the positivity/envelope control quantity."""
    total = float(np.sum(np.abs(field.coeffs)))
    return total - abs(field.theta0)


def sup_envelope(field: CoefficientField) -> float:
    """Upper bound theta_0 + 2^{d/2} sum_{xi != 0} |theta_xi| on the density."""
    return field.theta0 + 2.0 ** (field.dim / 2.0) * abs_coeff_tail_sum(field)


@dataclass(frozen=True)
class SynthDensity:
    """A synthetic density plus the certificates of its construction."""

    field: CoefficientField
    effective_radius: float
    positivity_floor: float
    sup_bound: float


def synth_density(
    alpha: float,
    d: int,
    band: int,
    tail_exponent_margin: float = 0.05,
    positivity_floor: float = 0.1,
    seed: int = 0,
) -> SynthDensity:
    """Random density with polynomially decaying coefficients.

    Coefficient magnitudes follow (1+||xi||^2)^{-(alpha + d/2 + margin)/2}
    with seed-determined signs, rescaled so that
    2^{d/2} sum_{xi != 0} |theta_xi| = 1 - positivity_floor.  The result is
    therefore >= positivity_floor pointwise and integrates to one.  The
    decay sits just inside the smoothness-alpha ellipsoid, so the returned
    effective_radius (the ellipsoid norm at alpha) is finite while higher
    frequencies stay active.
    """
    if not 0.0 < positivity_floor < 1.0:
        raise ValueError("positivity_floor must be in (0, 1)")
    if band < 0:
        raise ValueError("band must be >= 0")
    if band == 0:
        field = uniform_density(d, 0)
        return SynthDensity(field, ellipsoid_norm(field, alpha), positivity_floor, 1.0)
    rng = make_rng("synth-density", seed)
    sq = sq_norm_grid(d, band)
    decay = (1.0 + sq) ** (-(alpha + d / 2.0 + tail_exponent_margin) / 2.0)
    signs = rng.choice([-1.0, 1.0], size=decay.shape)
    mags = decay.copy()
    mags.flat[0] = 0.0
    scale = (1.0 - positivity_floor) / (2.0 ** (d / 2.0) * np.sum(mags))
    arr = scale * signs * mags
    arr.flat[0] = 1.0
    field = CoefficientField(d, band, "density", arr)
    return SynthDensity(field, ellipsoid_norm(field, alpha), positivity_floor, sup_envelope(field))
