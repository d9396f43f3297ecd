import math
from fractions import Fraction

import numpy as np
import pytest

from advdens.networks import (
    ReluNetwork,
    covering_bound,
    dudley_bound,
    holder_enclosure_radius,
    lipschitz_cert,
    net_eval,
    rate_comparison,
    sobolev_enclosure,
)


def random_network(rng, dim=None, depth=None, v_cap=2.0):
    dim = dim or int(rng.integers(1, 5))
    depth = depth or int(rng.integers(1, 5))
    V = float(rng.uniform(1.0, v_cap))
    names = [f"x{i + 1}" for i in range(dim)] + ["one", "zero"]
    layers = []
    for li in range(1, depth + 1):
        n_units = 1 if li == depth else int(rng.integers(1, 4))
        layer = []
        for _ in range(n_units):
            k = int(rng.integers(1, min(4, len(names)) + 1))
            refs = rng.choice(names, size=k, replace=False)
            raw = rng.standard_normal(k)
            scale = float(rng.uniform(0.2, 1.0)) * V / max(np.sum(np.abs(raw)), 1e-12)
            layer.append({str(r): float(w * scale) for r, w in zip(refs, raw)})
        layers.append(tuple(layer))
        names += [f"L{li}U{u + 1}" for u in range(n_units)]
    return ReluNetwork(dim, depth, V, tuple(layers))


def reference_eval(net, x):
    """Independent recursive-definition interpreter (memoised)."""
    memo = {}

    def value(name):
        if name in memo:
            return memo[name]
        if name == "one":
            out = 1.0
        elif name == "zero":
            out = 0.0
        elif name.startswith("x"):
            out = float(x[int(name[1:]) - 1])
        else:
            li, ui = name[1:].split("U")
            unit = net.layers[int(li) - 1][int(ui) - 1]
            out = sum(w * max(value(ref), 0.0) for ref, w in unit.items())
        memo[name] = out
        return out

    return value(f"L{net.depth}U1")


# --- evaluation ---------------------------------------------------------------

def test_all_zero_weights():
    net = ReluNetwork(2, 2, 1.0, (({"x1": 0.0},), ({"L1U1": 0.0},)))
    pts = np.random.default_rng(0).random((20, 2))
    assert np.all(net_eval(net, pts) == 0.0)


def test_identity_unit_on_nonnegative_input():
    net = ReluNetwork(1, 1, 1.0, (({"x1": 1.0},),))
    xs = np.linspace(0.0, 1.0, 11).reshape(-1, 1)
    assert np.allclose(net_eval(net, xs), xs[:, 0], atol=0.0)


def test_matches_recursive_interpreter():
    rng = np.random.default_rng(1)
    for _ in range(20):
        net = random_network(rng)
        pts = rng.random((50, net.dim))
        got = net_eval(net, pts)
        want = np.array([reference_eval(net, p) for p in pts])
        assert np.max(np.abs(got - want)) < 1e-12


def test_dangling_reference_rejected():
    with pytest.raises(ValueError):
        ReluNetwork(1, 1, 1.0, (({"x2": 1.0},),))
    with pytest.raises(ValueError):
        ReluNetwork(1, 2, 1.0, (({"L2U1": 1.0},), ({"x1": 1.0},)))


def test_l1_budget_enforced():
    with pytest.raises(ValueError):
        ReluNetwork(1, 1, 1.0, (({"x1": 0.8, "one": 0.3},),))


# --- Lipschitz certificates -----------------------------------------------------

def test_coarse_certificate_values():
    net = ReluNetwork(1, 1, 1.0, (({"x1": 1.0},),))
    assert lipschitz_cert(net).coarse == 1.0
    net3 = ReluNetwork(
        1, 3, 2.0,
        (({"x1": 1.5},), ({"L1U1": 1.2, "x1": 0.5},), ({"L2U1": 2.0},)),
    )
    assert lipschitz_cert(net3).coarse == 8.0


def test_tight_below_coarse_and_sound():
    rng = np.random.default_rng(2)
    for _ in range(25):
        net = random_network(rng)
        cert = lipschitz_cert(net)
        assert cert.tight <= cert.coarse + 1e-12
        x = rng.random((2000, net.dim))
        y = rng.random((2000, net.dim))
        fx, fy = net_eval(net, x), net_eval(net, y)
        gaps = np.abs(fx - fy)
        dists = np.max(np.abs(x - y), axis=1)
        assert np.all(gaps <= cert.tight * dists + 1e-12)


def test_tight_handles_skip_connections():
    # second layer reaches back to the input with a sub-unit first layer
    net = ReluNetwork(1, 2, 2.0, (({"x1": 0.25},), ({"x1": 2.0},)))
    cert = lipschitz_cert(net)
    xs = np.array([[0.0], [1.0]])
    slope = abs(np.diff(net_eval(net, xs))[0])
    assert slope <= cert.tight + 1e-12
    assert cert.tight >= 2.0  # the 0.25-norm first layer must not shrink it


# --- enclosures and covering bounds ----------------------------------------------

def test_sobolev_enclosure_values():
    assert sobolev_enclosure(1, 1.0, 3) == pytest.approx(2.0, abs=1e-15)
    assert sobolev_enclosure(2, 2.0, 1) == pytest.approx(math.sqrt(2.0) * 4.0, abs=1e-12)


def test_enclosure_monotone():
    base = sobolev_enclosure(2, 1.5, 2)
    assert sobolev_enclosure(3, 1.5, 2) > base
    assert sobolev_enclosure(2, 1.6, 2) > base
    assert sobolev_enclosure(2, 1.5, 3) > base


def test_holder_enclosure_radius():
    assert holder_enclosure_radius(1, 3) == pytest.approx(2.0, abs=1e-15)


def test_covering_bound_frozen_value():
    assert covering_bound(1.0, 1, 0.5, 0) == pytest.approx(0.5 * math.log(2.0), abs=1e-12)
    assert covering_bound(1.0, 1, 0.5, 0) == pytest.approx(0.34657, abs=5e-6)


def test_covering_bound_rejects_nonpositive_eps():
    with pytest.raises(ValueError):
        covering_bound(0.0, 2, 1.0, 1)


def test_covering_bound_monotone_in_eps():
    vals = [covering_bound(e, 2, 1.0, 3) for e in (0.05, 0.1, 0.5, 1.0)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_covering_bound_doubling_v():
    ell = 2
    ratio = covering_bound(0.3, ell, 2.0, 4) / covering_bound(0.3, ell, 1.0, 4)
    assert ratio == pytest.approx(2.0 ** (ell * (ell + 1)), rel=1e-12)


# --- Dudley entropy integral ------------------------------------------------------

def test_dudley_zero_entropy():
    res = dudley_bound(lambda e: 0.0, 1000)
    assert res.value < 1e-6
    assert not res.integral_diverges_at_zero


def test_dudley_matches_grid_search():
    c = 0.7
    n = 10**4
    res = dudley_bound(lambda e: c / e**2, n)
    # independent oracle: dense grid over delta with the analytic integral
    deltas = np.linspace(1e-6, 0.5 - 1e-9, 10_000)
    integral = math.sqrt(c) * (np.log(0.5) - np.log(deltas))
    objective = 4.0 * deltas + (8.0 * math.sqrt(2.0) / math.sqrt(n)) * integral
    assert res.value == pytest.approx(2.0 * float(objective.min()), abs=1e-6)


def test_dudley_reports_divergence():
    res = dudley_bound(lambda e: covering_bound(e, 2, 0.5, 1), 10**4)
    assert res.integral_diverges_at_zero
    assert math.isfinite(res.value)


def test_dudley_nonincreasing_in_n():
    entropy = lambda e: covering_bound(e, 2, 0.05, 1)
    vals = [dudley_bound(entropy, n).value for n in (10**3, 10**4, 10**5)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_dudley_chaining_slope():
    # small entropy constant keeps the additive delta term subdominant over
    # the grid, so the n^{-1/(2 ell)} scaling shows cleanly at ell = 2
    entropy = lambda e: covering_bound(e, 2, 0.05, 1)
    ns = [10**3, 10**4, 10**5, 10**6, 10**7]
    vals = [dudley_bound(entropy, n).value for n in ns]
    slope = np.polyfit(np.log(ns), np.log(vals), 1)[0]
    assert abs(slope + 0.25) < 0.01


# --- rate comparison ---------------------------------------------------------------

def test_crossover_value():
    res = rate_comparison(3, 1.0, 4, 1.0, 1.0, 10**4)
    assert res.crossover_alpha == pytest.approx(0.0, abs=1e-15)
    assert res.smoothed_faster_asymptotically


def test_smooth_density_scenario():
    # alpha + 1 = d/(2 C0) with depth ell >= C0 + 1 puts the smoothed bound ahead
    C0, d = 2.0, 12
    alpha = d / (2.0 * C0) - 1.0
    res = rate_comparison(int(C0 + 1), 1.0, d, alpha + 1e-9, 1.0, 10**6)
    assert res.smoothed_faster_asymptotically
    res_shallow = rate_comparison(2, 1.0, d, alpha, 1.0, 10**6)
    assert not res_shallow.smoothed_faster_asymptotically


def test_exponent_identity_exact_rational():
    rng = np.random.default_rng(3)
    for _ in range(100):
        alpha = Fraction(int(rng.integers(0, 50)), int(rng.integers(1, 20)))
        d = int(rng.integers(1, 30))
        ell = int(rng.integers(2, 8))
        lhs = Fraction(alpha + 1, 2 * alpha + 2 + d) > Fraction(1, 2 * ell)
        rhs = alpha > Fraction(d, 2 * (ell - 1)) - 1
        assert lhs == rhs


def test_rate_comparison_needs_depth_two():
    with pytest.raises(ValueError):
        rate_comparison(1, 1.0, 2, 1.0, 1.0, 100)


def test_enclosure_composes_with_estimator_bound():
    # plugging the W^{1,2} enclosure radius into the bias-variance bound at
    # beta = 1 and the matching cutoff schedule reproduces the class rate
    # n^{-(alpha+1)/(2 alpha+2+d)} with constant L_beta = sqrt(d+1) V^ell
    from advdens.estimators import bias_variance_bound, optimal_cutoff

    ell, V, d, alpha, L = 3, 1.5, 2, 2.0, 1.0
    L_beta = sobolev_enclosure(ell, V, d)
    ns = np.array([10**5, 10**6, 10**7, 10**8, 10**9])
    vals = [
        bias_variance_bound(n, optimal_cutoff(int(n), alpha, 1.0, d, 1.0), d,
                            L, L_beta, alpha, 1.0, C=1.0)
        for n in ns
    ]
    slope = np.polyfit(np.log(ns), np.log(vals), 1)[0]
    exponent = (alpha + 1.0) / (2.0 * alpha + 2.0 + d)
    assert slope == pytest.approx(-exponent, abs=0.02)
    comp = rate_comparison(ell, V, d, alpha, L, 10**6)
    assert comp.smoothed_bound == pytest.approx(
        L_beta * L * (10.0**6) ** -exponent, rel=1e-12
    )


# --- serialization -----------------------------------------------------------------

def test_network_json_round_trip(tmp_path):
    rng = np.random.default_rng(4)
    net = random_network(rng)
    path = tmp_path / "net.json"
    net.save(path)
    back = ReluNetwork.load(path)
    assert back == net
    pts = rng.random((10, net.dim))
    assert np.array_equal(net_eval(net, pts), net_eval(back, pts))


def test_load_rejects_budget_violation(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"dim": 1, "depth": 1, "V": 1.0, "layers": [[{"x1": 3.0}]]}')
    with pytest.raises(ValueError):
        ReluNetwork.load(path)
