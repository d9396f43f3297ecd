"""Feedforward ReLU discriminator classes as certified metric objects.

A network of depth ell over inputs in [0,1]^d is a list of layers; each
unit is a weighted combination sum_r w_r relu(value_r) over named earlier
outputs (inputs x1..xd, the constants one/zero, or units L{i}U{j} from
strictly earlier layers), with ||w||_1 <= V for every unit.  Networks here
are never trained: the class geometry is what matters.  The calculators
certify Lipschitz constants (V^ell coarse, per-layer products tight),
enclose the class in a first-order Sobolev ball of radius sqrt(d+1) V^ell,
and evaluate the covering-number / Dudley entropy-integral machinery that
governs the empirical-measure rate n^{-1/(2 ell)}.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

_L1_TOL = 1e-9


@dataclass(frozen=True)
class ReluNetwork:
    """Depth-ell ReLU network with per-unit l1 weight budget V."""

    dim: int
    depth: int
    V: float
    layers: tuple  # tuple of layers; each layer is a tuple of {ref: weight} dicts

    def __post_init__(self):
        if self.dim < 1 or self.depth < 1:
            raise ValueError("need dim >= 1 and depth >= 1")
        if self.V < 1.0:
            raise ValueError("weight budget V must be >= 1")
        layers = tuple(tuple(dict(unit) for unit in layer) for layer in self.layers)
        if len(layers) != self.depth:
            raise ValueError(f"expected {self.depth} layers, got {len(layers)}")
        if len(layers[-1]) != 1:
            raise ValueError("final layer must contain exactly one output unit")
        names = {f"x{i + 1}" for i in range(self.dim)} | {"one", "zero"}
        for li, layer in enumerate(layers, start=1):
            if not layer:
                raise ValueError(f"layer {li} is empty")
            for ui, unit in enumerate(layer, start=1):
                norm = sum(abs(w) for w in unit.values())
                if norm > self.V + _L1_TOL:
                    raise ValueError(
                        f"unit L{li}U{ui} violates the l1 budget: {norm} > V={self.V}"
                    )
                for ref in unit:
                    if ref not in names:
                        raise ValueError(f"unit L{li}U{ui} references unknown output {ref!r}")
            names |= {f"L{li}U{ui}" for ui in range(1, len(layer) + 1)}
        object.__setattr__(self, "layers", layers)

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "depth": self.depth,
            "V": self.V,
            "layers": [[dict(u) for u in layer] for layer in self.layers],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ReluNetwork":
        return cls(int(data["dim"]), int(data["depth"]), float(data["V"]),
                   tuple(tuple(data["layers"][i]) for i in range(len(data["layers"]))))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh)

    @classmethod
    def load(cls, path) -> "ReluNetwork":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


def net_eval(net: ReluNetwork, x) -> np.ndarray:
    """Feedforward evaluation; x is a point (d,) or batch (n, d)."""
    arr = np.asarray(x, dtype=np.float64)
    single = arr.ndim == 1
    pts = arr.reshape(1, -1) if single else arr
    if pts.shape[1] != net.dim:
        raise ValueError(f"points have dim {pts.shape[1]}, network has dim {net.dim}")
    n = pts.shape[0]
    values = {"one": np.ones(n), "zero": np.zeros(n)}
    for i in range(net.dim):
        values[f"x{i + 1}"] = pts[:, i]
    for li, layer in enumerate(net.layers, start=1):
        for ui, unit in enumerate(layer, start=1):
            acc = np.zeros(n)
            for ref, w in unit.items():
                acc += w * np.maximum(values[ref], 0.0)
            values[f"L{li}U{ui}"] = acc
    out = values[f"L{net.depth}U1"]
    return float(out[0]) if single else out


@dataclass(frozen=True)
class LipschitzCert:
    coarse: float  # V^ell
    tight: float   # product of per-layer max unit l1 norms (floored at 1)


def lipschitz_cert(net: ReluNetwork) -> LipschitzCert:
    """Certified l-infinity Lipschitz bounds.

    The induction |f(x)-f(y)| <= ||w||_1 max_j |f_j(x)-f_j(y)| gives V per
    layer (coarse V^ell) or the actual per-layer max l1 norm.  Because
    units may reference inputs across layers, each per-layer factor is
    floored at 1; the tight certificate never exceeds the coarse one.
    """
    coarse = net.V**net.depth
    tight = 1.0
    for layer in net.layers:
        tight *= max(1.0, max(sum(abs(w) for w in unit.values()) for unit in layer))
    return LipschitzCert(coarse, min(tight, coarse))


def sobolev_enclosure(ell: int, V: float, d: int) -> float:
    """Radius sqrt(d+1) V^ell of the first-order Sobolev ball enclosing
    the depth-ell class (gradient bounded coordinatewise by V^ell)."""
    return math.sqrt(d + 1.0) * V**ell


def holder_enclosure_radius(k: int, d: int) -> float:
    """Radius r_k = sqrt(1 + k d^k) with W^{k,inf}(1) inside W^{k,2}(r_k)."""
    return math.sqrt(1.0 + k * float(d) ** k)


def covering_bound(eps: float, ell: int, V: float, d: int) -> float:
    """log covering number bound (1/2)(1/eps)^{2 ell} (2V)^{ell(ell+1)} log(2d+2)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return 0.5 * (1.0 / eps) ** (2 * ell) * (2.0 * V) ** (ell * (ell + 1)) * math.log(2 * d + 2)


@dataclass(frozen=True)
class DudleyResult:
    value: float
    delta_star: float
    integral_diverges_at_zero: bool


def dudley_bound(entropy, n: int, tol: float = 1e-8) -> DudleyResult:
    """Symmetrization + entropy integral bound on the empirical IPM error.

    Minimises f(delta) = 4 delta + (8 sqrt(2)/sqrt(n)) * integral from
    delta to 1/2 of sqrt(entropy(eps)) d eps over delta in (0, 1/2) by
    golden-section search (f is convex: its derivative 4 - c sqrt(entropy)
    is nondecreasing), and returns twice the infimum.  A divergent
    integral at 0 is reported, never raised: any positive delta still
    yields a valid bound.
    """

    def sqrt_entropy(e):
        return math.sqrt(max(0.0, entropy(e)))

    def objective(delta: float) -> float:
        integral, _ = quad(sqrt_entropy, delta, 0.5, epsabs=1e-12, epsrel=1e-10, limit=200)
        return 4.0 * delta + (8.0 * math.sqrt(2.0) / math.sqrt(n)) * integral

    lo, hi = 1e-12, 0.5 - 1e-12
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c1 = b - invphi * (b - a)
    c2 = a + invphi * (b - a)
    f1, f2 = objective(c1), objective(c2)
    while b - a > tol:
        if f1 < f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - invphi * (b - a)
            f1 = objective(c1)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + invphi * (b - a)
            f2 = objective(c2)
    delta_star = 0.5 * (a + b)
    value = 2.0 * objective(delta_star)
    diverges = sqrt_entropy(1e-9) * 1e-9 > 10.0 * max(sqrt_entropy(1e-3) * 1e-3, 1e-30)
    return DudleyResult(value, delta_star, diverges)


@dataclass(frozen=True)
class RateComparison:
    smoothed_bound: float
    chaining_bound: float
    crossover_alpha: float
    smoothed_faster_asymptotically: bool


def rate_comparison(ell: int, V: float, d: int, alpha: float, L: float, n: int) -> RateComparison:
    """Smoothed-estimator rate vs chaining rate for a depth-ell class.

    Bound values are computed with leading constants set to one; the log
    factor in the chaining bound uses log(2d+2) from the covering bound so
    d = 1 stays meaningful.  The asymptotic comparison is at the exponent
    level: the smoothed bound n^{-(alpha+1)/(2 alpha+2+d)} wins exactly
    when alpha > d/(2(ell-1)) - 1.
    """
    if ell < 2:
        raise ValueError("chaining comparison requires depth >= 2")
    smoothed = L * math.sqrt(d + 1.0) * V**ell * n ** (-(alpha + 1.0) / (2.0 * alpha + 2.0 + d))
    chaining = (
        math.log(2 * d + 2) ** (1.0 / (2 * ell))
        * (2.0 * V) ** ((ell + 1) / 2.0)
        * n ** (-1.0 / (2.0 * ell))
    )
    crossover = d / (2.0 * (ell - 1.0)) - 1.0
    return RateComparison(smoothed, chaining, crossover, alpha > crossover)
