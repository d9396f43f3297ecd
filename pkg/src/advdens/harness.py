"""Monte Carlo rate-of-convergence experiments and report emission.

A rate experiment draws R replicate samples of size n from a fixed
synthetic truth, runs the configured estimator, measures the exact
ellipsoid IPM to the truth, and fits the log-log slope of the mean error
across the n grid.  Everything is keyed off one base seed: replicate r at
sample size n always uses the stream (base_seed, "replicate", n, r), so
runs parallelise without changing results, and smoothed/empirical runs
with the same base seed consume identical SampleSets.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed
from scipy.stats import t as student_t

from ._seeds import derive_seed
from .estimators import empirical_coeffs, kde_estimator, optimal_cutoff, smoothed_estimator
from .metrics import sobolev_ipm
from .sampling import inverse_cdf_sample_1d, rejection_sample
from .spectral import SynthDensity, ellipsoid_norm, synth_density

ESTIMATORS = ("smoothed", "empirical", "kde")
SAMPLERS = ("rejection", "inverse-cdf")


def band_cap_for(n: int, d: int) -> int:
    """K(n) = ceil(n^{1/d}), computed without float rounding surprises."""
    k = max(1, int(round(n ** (1.0 / d))))
    while k**d < n:
        k += 1
    while k > 1 and (k - 1) ** d >= n:
        k -= 1
    return k


def theoretical_exponent(alpha: float, beta: float, d: int) -> tuple[float, str]:
    """Convergence exponent of the smoothed-plug-in GAN error and its regime.

    Parametric n^{-1/2} when the metric is weak (beta >= d/2); the
    empirical-measure rate n^{-beta/d} when the density is too rough to
    exploit (alpha below 2 beta^2/(d - 2 beta)); otherwise the smoothing
    rate n^{-(alpha+beta)/(2(alpha+beta)+d)}.
    """
    if alpha < 0 or beta < 0 or d < 1:
        raise ValueError("need alpha, beta >= 0 and d >= 1")
    if beta >= d / 2.0:
        return 0.5, "parametric"
    threshold = 2.0 * beta * beta / (d - 2.0 * beta)
    if alpha < threshold:
        return beta / d, "empirical"
    return (alpha + beta) / (2.0 * (alpha + beta) + d), "nonparametric"


@dataclass(frozen=True)
class RateExperimentConfig:
    d: int
    alpha: float
    beta: float
    n_grid: tuple
    replicates: int
    estimator: str = "smoothed"
    L: float | None = None  # None: use the truth's effective radius
    cutoff_constant: float = 1.0
    base_seed: int = 0
    truth_band: int | None = None  # None: max K(n); 0 forces the uniform truth
    positivity_floor: float = 0.1
    tail_margin: float = 0.05
    sampler: str = "rejection"
    jobs: int = 1

    def __post_init__(self):
        grid = tuple(int(n) for n in self.n_grid)
        if len(grid) < 1 or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("n_grid must be non-empty and strictly increasing")
        object.__setattr__(self, "n_grid", grid)
        if self.replicates < 10:
            raise ValueError("need at least 10 replicates")
        if self.estimator not in ESTIMATORS:
            raise ValueError(f"estimator must be one of {ESTIMATORS}")
        if self.estimator == "kde" and self.d != 1:
            raise ValueError("the kde estimator is 1-d only")
        if self.sampler not in SAMPLERS:
            raise ValueError(f"sampler must be one of {SAMPLERS}")
        max_k = band_cap_for(grid[-1], self.d)
        if self.truth_band is None:
            object.__setattr__(self, "truth_band", max_k)
        elif self.truth_band != 0 and self.truth_band < max_k:
            raise ValueError(f"truth_band must be 0 (uniform) or >= max K(n) = {max_k}")
        count = (self.truth_band + 1) ** self.d
        if count * 8 > 2e9:
            raise ValueError(f"band requires {count} coefficients; refusing to allocate")

    def to_json_dict(self) -> dict:
        return {
            "d": self.d,
            "alpha": self.alpha,
            "beta": self.beta,
            "n_grid": list(self.n_grid),
            "replicates": self.replicates,
            "estimator": self.estimator,
            "L": self.L,
            "cutoff_constant": self.cutoff_constant,
            "base_seed": self.base_seed,
            "truth_band": self.truth_band,
            "positivity_floor": self.positivity_floor,
            "tail_margin": self.tail_margin,
            "sampler": self.sampler,
            "jobs": self.jobs,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "RateExperimentConfig":
        data = dict(data)
        data["n_grid"] = tuple(data["n_grid"])
        return cls(**data)


@dataclass(frozen=True)
class RateRow:
    n: int
    mean_error: float
    stderr: float
    replicates: int


@dataclass(frozen=True)
class RateReport:
    rows: tuple
    slope: float
    slope_ci: float
    theoretical_exponent: float
    regime: str
    guard_fired: bool
    derived: dict
    config: dict
    seed: int
    replicate_errors: dict | None = field(default=None, compare=False)

    def to_json_dict(self) -> dict:
        return {
            "rows": [
                {"n": r.n, "mean_error": r.mean_error, "stderr": r.stderr,
                 "replicates": r.replicates}
                for r in self.rows
            ],
            "slope": self.slope,
            "slope_ci": self.slope_ci,
            "theoretical_exponent": self.theoretical_exponent,
            "regime": self.regime,
            "guard_fired": self.guard_fired,
            "derived": self.derived,
            "config": self.config,
            "seed": self.seed,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "RateReport":
        rows = tuple(
            RateRow(int(r["n"]), float(r["mean_error"]), float(r["stderr"]),
                    int(r["replicates"]))
            for r in data["rows"]
        )
        return cls(rows, data["slope"], data["slope_ci"], data["theoretical_exponent"],
                   data["regime"], data["guard_fired"], data["derived"], data["config"],
                   data["seed"])


def make_truth(cfg: RateExperimentConfig) -> SynthDensity:
    return synth_density(
        cfg.alpha, cfg.d, cfg.truth_band, cfg.tail_margin, cfg.positivity_floor,
        seed=derive_seed(cfg.base_seed, "truth"),
    )


def _one_replicate(truth_field, cfg: RateExperimentConfig, n: int, K: int, M: int,
                   L: float, r: int) -> float:
    seed = derive_seed(cfg.base_seed, "replicate", n, r)
    if cfg.sampler == "rejection":
        sample = rejection_sample(truth_field, n, seed).sample_set
    else:
        sample = inverse_cdf_sample_1d(truth_field, n, seed)
    if cfg.estimator == "smoothed":
        est = smoothed_estimator(sample, M, K)
    elif cfg.estimator == "empirical":
        est = empirical_coeffs(sample, K)
    else:
        # kde: bandwidth tied to the cutoff scale, projected onto band M
        est = kde_estimator(sample, min(0.49, 1.0 / (2.0 * M)), band=M).field
    return sobolev_ipm(est, truth_field, cfg.beta, L).value


def fit_slope(ns, means, guard_rms_factor: float = 3.0):
    """Least-squares log-log slope with a pre-asymptotic guard.

    If the smallest-n point deviates from the fit by more than
    guard_rms_factor times the residual RMS it is dropped and the fit is
    redone; the return reports whether the guard fired.  The slope CI is
    the 95% half-width from the usual OLS variance estimate.
    """
    ns = np.asarray(ns, dtype=np.float64)
    means = np.asarray(means, dtype=np.float64)
    if len(ns) < 4:
        raise ValueError("need at least 4 grid points to fit a slope")

    def ols(x, y):
        A = np.stack([x, np.ones_like(x)], axis=1)
        coef, *_ = np.linalg.lstsq(A, y, rcond=None)
        resid = y - A @ coef
        dof = len(x) - 2
        sigma2 = float(resid @ resid) / max(dof, 1)
        se = math.sqrt(sigma2 / float(np.sum((x - x.mean()) ** 2)))
        return float(coef[0]), resid, se, dof

    x, y = np.log(ns), np.log(np.maximum(means, 1e-300))
    slope, resid, se, dof = ols(x, y)
    guard = False
    if len(ns) > 4:
        # judge the smallest-n point against the fit of the others: an
        # outlier inflates the RMS of its own fit, masking itself
        tail_slope, tail_resid, tail_se, tail_dof = ols(x[1:], y[1:])
        tail_rms = float(np.sqrt(np.mean(tail_resid**2)))
        intercept = float(np.mean(y[1:]) - tail_slope * np.mean(x[1:]))
        dev0 = abs(y[0] - (tail_slope * x[0] + intercept))
        if dev0 > guard_rms_factor * tail_rms + 1e-12:
            guard = True
            slope, se, dof = tail_slope, tail_se, tail_dof
    half = float(student_t.ppf(0.975, dof) * se) if dof > 0 else math.inf
    return slope, half, guard


def run_rate_experiment(cfg: RateExperimentConfig, keep_replicates: bool = False) -> RateReport:
    truth = make_truth(cfg)
    L = cfg.L if cfg.L is not None else truth.effective_radius
    k_grid = [band_cap_for(n, cfg.d) for n in cfg.n_grid]
    m_grid = [
        min(optimal_cutoff(n, cfg.alpha, cfg.beta, cfg.d, cfg.cutoff_constant), k)
        for n, k in zip(cfg.n_grid, k_grid)
    ]
    tasks = [
        (n, k, m, r)
        for n, k, m in zip(cfg.n_grid, k_grid, m_grid)
        for r in range(cfg.replicates)
    ]
    jobs = cfg.jobs if cfg.jobs and cfg.jobs > 0 else min(8, os.cpu_count() or 1)
    if jobs == 1:
        flat = [_one_replicate(truth.field, cfg, n, k, m, L, r) for n, k, m, r in tasks]
    else:
        flat = Parallel(n_jobs=jobs)(
            delayed(_one_replicate)(truth.field, cfg, n, k, m, L, r)
            for n, k, m, r in tasks
        )
    errors = np.asarray(flat).reshape(len(cfg.n_grid), cfg.replicates)
    rows = tuple(
        RateRow(
            n,
            float(np.mean(errs)),
            float(np.std(errs, ddof=1) / math.sqrt(cfg.replicates)),
            cfg.replicates,
        )
        for n, errs in zip(cfg.n_grid, errors)
    )
    exponent, regime = theoretical_exponent(cfg.alpha, cfg.beta, cfg.d)
    slope, half, guard = fit_slope(cfg.n_grid, [r.mean_error for r in rows])
    derived = {
        "L": L,
        "truth_radius_alpha": truth.effective_radius,
        "truth_radius_beta": ellipsoid_norm(truth.field, cfg.beta),
        "truth_sup_bound": truth.sup_bound,
        "K_grid": k_grid,
        "M_grid": m_grid,
    }
    per_n = {int(n): errors[i] for i, n in enumerate(cfg.n_grid)} if keep_replicates else None
    return RateReport(rows, slope, half, exponent, regime, guard, derived,
                      cfg.to_json_dict(), cfg.base_seed, per_n)


def emit_report(report: RateReport, path, fmt: str = "json") -> None:
    if fmt == "json":
        with open(path, "w") as fh:
            json.dump(report.to_json_dict(), fh, indent=1)
            fh.write("\n")
    elif fmt == "csv":
        with open(path, "w") as fh:
            fh.write("n,mean_error,stderr,replicates\n")
            for r in report.rows:
                fh.write(f"{r.n},{r.mean_error!r},{r.stderr!r},{r.replicates}\n")
    else:
        raise ValueError("format must be json or csv")


def load_report(path) -> RateReport:
    with open(path) as fh:
        return RateReport.from_json_dict(json.load(fh))


def parse_config_file(path) -> RateExperimentConfig:
    """Flat key=value config; '#' starts a comment, n_grid is comma-separated."""
    raw = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            raw[key] = value
    kwargs = {}
    ints = {"d", "replicates", "base_seed", "truth_band", "jobs"}
    floats = {"alpha", "beta", "cutoff_constant", "positivity_floor", "tail_margin"}
    for key, value in raw.items():
        if key == "n_grid":
            kwargs[key] = tuple(int(v) for v in value.split(","))
        elif key == "L":
            kwargs[key] = None if value.lower() == "auto" else float(value)
        elif key in ints:
            kwargs[key] = int(value)
        elif key in floats:
            kwargs[key] = float(value)
        elif key in ("estimator", "sampler"):
            kwargs[key] = value
        else:
            raise ValueError(f"unknown config key {key!r}")
    return RateExperimentConfig(**kwargs)
