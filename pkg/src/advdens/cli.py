"""Command-line harness.

Subcommands:
  ipm         closed-form ellipsoid IPM between two coefficient files
  estimate    spectral estimator from a sample CSV
  sample      draw samples from a density file
  rate        Monte Carlo rate experiment from a key=value config file
  gan         ellipsoid-projection GAN solve (+ oracle report with --truth)
  lowerbound  VG codes and hypothesis-family certificates
  relu        certificates and bound calculators for a ReLU network file
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from . import lowerbound as lb
from . import networks
from .estimators import empirical_coeffs, kde_estimator, optimal_cutoff, smoothed_estimator
from .gan import GeneratorClass, gan_solve, oracle_check_matched
from .harness import emit_report, parse_config_file, run_rate_experiment
from .metrics import sobolev_ipm, total_variation_band, wasserstein1_1d
from .sampling import SampleSet, inverse_cdf_sample_1d, rejection_sample
from .spectral import CoefficientField, SobolevEllipsoid, synth_density


def _emit(data: dict, args) -> None:
    if getattr(args, "format", "json") == "csv":
        # flat key,value rendering of the top-level scalars
        lines = ["key,value"]
        lines += [
            f"{k},{v!r}" for k, v in data.items() if isinstance(v, (int, float, bool, str))
        ]
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps(data, indent=1) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_field(path) -> CoefficientField:
    """Coefficient file, either bare or wrapped by the estimate subcommand."""
    with open(path) as fh:
        data = json.load(fh)
    if "estimator" in data:
        data = data["estimator"]
    return CoefficientField.from_json_dict(data)


def _cmd_ipm(args) -> int:
    mu = _load_field(args.mu)
    nu = _load_field(args.nu)
    res = sobolev_ipm(mu, nu, args.beta, args.L, band=args.band)
    data = res.to_json_dict()
    if args.tv:
        data["total_variation"] = total_variation_band(mu, nu)
    if mu.dim == 1 and args.w1:
        data["wasserstein1"] = wasserstein1_1d(mu, nu)
    _emit(data, args)
    return 0


def _cmd_estimate(args) -> int:
    sample = SampleSet.from_csv(args.samples)
    K = args.K if args.K is not None else sample.n if sample.dim == 1 else args.band_cap
    if args.kind == "empirical":
        est = empirical_coeffs(sample, K)
        M = K
    elif args.kind == "smoothed":
        M = args.M
        if M is None:
            M = optimal_cutoff(sample.n, args.alpha, args.beta, sample.dim, args.c)
        M = min(M, K)
        est = smoothed_estimator(sample, M, K)
    else:
        M = args.M or optimal_cutoff(sample.n, args.alpha, args.beta, sample.dim, args.c)
        est = kde_estimator(sample, args.h, M).field
        K = M
    data = {"estimator": est.to_json_dict(),
            "meta": {"M": M, "K": K, "n": sample.n, "seed": sample.seed}}
    _emit(data, args)
    return 0


def _cmd_sample(args) -> int:
    if args.seed is None:
        args.seed = 0
    if args.density:
        field = _load_field(args.density)
    else:
        field = synth_density(args.alpha, args.d, args.band, seed=args.seed).field
    if args.method == "rejection":
        result = rejection_sample(field, args.n, args.seed)
        sample, rate = result.sample_set, result.acceptance_rate
    else:
        sample, rate = inverse_cdf_sample_1d(field, args.n, args.seed), None
    sample.to_csv(args.out or "samples.csv")
    if rate is not None:
        sys.stdout.write(f"acceptance_rate={rate!r}\n")
    return 0


def _cmd_rate(args) -> int:
    cfg = parse_config_file(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, base_seed=args.seed)
    report = run_rate_experiment(cfg)
    emit_report(report, args.out or f"rate-report.{args.format}", args.format)
    return 0


def _cmd_gan(args) -> int:
    nu_hat = _load_field(args.nu_hat)
    gen = GeneratorClass(SobolevEllipsoid(args.alpha_g, args.L_g), args.gen_band)
    sol = gan_solve(nu_hat, gen, args.beta, args.L, tol=args.tol)
    data = {
        "solution": sol.field.to_json_dict(),
        "lambda": sol.lam,
        "objective": sol.objective,
        "constraint_residual": sol.constraint_residual,
        "min_density_on_grid": sol.min_density_on_grid,
    }
    if args.truth:
        truth = _load_field(args.truth)
        rep = oracle_check_matched(sol.field, truth, nu_hat, gen, args.beta, args.L)
        data["oracle"] = rep.to_json_dict()
    _emit(data, args)
    return 0


def _cmd_lowerbound(args) -> int:
    if args.seed is None:
        args.seed = 0
    if args.family == "vg":
        code = lb.vg_code(args.h, args.seed)
        data = {"h": code.h, "H": code.H, "min_distance": code.min_distance,
                "words": code.words.tolist()}
    elif args.family == "freq":
        code = lb.vg_code((args.M + 1) ** args.d, args.seed)
        fam = lb.freq_hypotheses(args.M, args.alpha, args.beta, args.d, args.L, code)
        pairs = []
        for j in range(1, min(len(fam.fields), 16)):
            sep = lb.separation(fam.fields[j], fam.fields[0], args.beta, args.L,
                                fam.c_alpha, fam.c_beta)
            pairs.append({"j": j, "exact_ipm": sep.exact_ipm,
                          "lower_cert": sep.lower_cert, "hamming": sep.hamming})
        data = {
            "family": "frequency", "M": fam.M, "d": fam.d,
            "alpha": fam.alpha, "beta": fam.beta, "L": fam.L,
            "c_alpha": fam.c_alpha, "c_beta": fam.c_beta,
            "H": code.H, "min_distance": code.min_distance,
            "max_membership_norm": fam.max_membership_norm,
            "separations_vs_null": pairs,
            "code_words": code.words.tolist(),
        }
    else:
        code = lb.vg_code(args.m ** args.d, args.seed)
        fam = lb.spatial_bump_family(args.m, args.alpha, args.beta, args.d, code,
                                     a=args.a)
        cert = fam.certificates
        data = {
            "family": "spatial", "m": fam.m, "d": fam.d, "a": fam.a,
            "alpha": fam.alpha, "beta": fam.beta,
            "H": code.H, "min_distance": code.min_distance,
            "code_words": code.words.tolist(),
            "c_w": fam.c_ws.tolist(),
            "integrals": cert["integrals"].tolist(),
            "min_density": cert["min_density"].tolist(),
            "kl_per_sample": cert["kl_per_sample"].tolist(),
            "chi2": cert["chi2"].tolist(),
            "proof_terms": cert["proof_terms"].tolist(),
        }
    _emit(data, args)
    return 0


def _cmd_relu(args) -> int:
    net = networks.ReluNetwork.load(args.network)
    cert = networks.lipschitz_cert(net)
    data = {
        "dim": net.dim, "depth": net.depth, "V": net.V,
        "lipschitz_coarse": cert.coarse, "lipschitz_tight": cert.tight,
        "sobolev_enclosure": networks.sobolev_enclosure(net.depth, net.V, net.dim),
    }
    if args.eps is not None:
        data["log_covering_bound"] = networks.covering_bound(args.eps, net.depth,
                                                             net.V, net.dim)
    if args.n is not None and net.depth >= 2:
        res = networks.dudley_bound(
            lambda e: networks.covering_bound(e, net.depth, net.V, net.dim), args.n
        )
        data["dudley_bound"] = res.value
        data["dudley_delta_star"] = res.delta_star
    _emit(data, args)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="advdens", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="seed for seeded operations (ignored by pure ones)")
    common.add_argument("--out", default=None)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("ipm", parents=[common], help="ellipsoid IPM between two coefficient files")
    q.add_argument("mu")
    q.add_argument("nu")
    q.add_argument("--beta", type=float, required=True)
    q.add_argument("--L", type=float, default=1.0)
    q.add_argument("--band", type=int, default=None)
    q.add_argument("--tv", action="store_true", help="also report total variation")
    q.add_argument("--w1", action="store_true", help="also report W1 (dim 1)")
    q.set_defaults(func=_cmd_ipm)

    q = sub.add_parser("estimate", parents=[common], help="spectral estimator from samples")
    q.add_argument("samples", help="CSV written by the sample subcommand")
    q.add_argument("--kind", choices=("smoothed", "empirical", "kde"), default="smoothed")
    q.add_argument("--M", type=int, default=None)
    q.add_argument("--K", type=int, default=None)
    q.add_argument("--band-cap", type=int, default=64)
    q.add_argument("--alpha", type=float, default=1.0)
    q.add_argument("--beta", type=float, default=1.0)
    q.add_argument("--c", type=float, default=1.0)
    q.add_argument("--h", type=float, default=0.1, help="KDE bandwidth")
    q.set_defaults(func=_cmd_estimate)

    q = sub.add_parser("sample", parents=[common], help="draw samples from a spectral density")
    q.add_argument("--density", default=None, help="coefficient JSON (default: synth)")
    q.add_argument("--alpha", type=float, default=1.0)
    q.add_argument("--d", type=int, default=1)
    q.add_argument("--band", type=int, default=16)
    q.add_argument("-n", type=int, required=True)
    q.add_argument("--method", choices=("rejection", "inverse-cdf"), default="rejection")
    q.set_defaults(func=_cmd_sample)

    q = sub.add_parser("rate", parents=[common], help="rate-of-convergence experiment")
    q.add_argument("--config", required=True)
    q.set_defaults(func=_cmd_rate)

    q = sub.add_parser("gan", parents=[common], help="projection GAN solve")
    q.add_argument("--nu-hat", required=True)
    q.add_argument("--alpha-g", type=float, required=True)
    q.add_argument("--L-g", type=float, required=True)
    q.add_argument("--gen-band", type=int, required=True)
    q.add_argument("--beta", type=float, required=True)
    q.add_argument("--L", type=float, default=1.0)
    q.add_argument("--tol", type=float, default=1e-10)
    q.add_argument("--truth", default=None)
    q.set_defaults(func=_cmd_gan)

    q = sub.add_parser("lowerbound", parents=[common], help="lower-bound constructions")
    q.add_argument("--family", choices=("vg", "freq", "spatial"), required=True)
    q.add_argument("--h", type=int, default=16)
    q.add_argument("--M", type=int, default=4)
    q.add_argument("--m", type=int, default=8)
    q.add_argument("--d", type=int, default=1)
    q.add_argument("--alpha", type=float, default=1.0)
    q.add_argument("--beta", type=float, default=1.0)
    q.add_argument("--L", type=float, default=1.0)
    q.add_argument("--a", type=float, default=None)
    q.set_defaults(func=_cmd_lowerbound)

    q = sub.add_parser("relu", parents=[common], help="ReLU network certificates")
    q.add_argument("network", help="network JSON file")
    q.add_argument("--eps", type=float, default=None)
    q.add_argument("--n", type=int, default=None)
    q.set_defaults(func=_cmd_relu)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
