import math

import numpy as np
import pytest
from scipy.integrate import quad

from advdens.metrics import (
    lipschitz_norm_report,
    pairing,
    sobolev_ipm,
    total_variation_band,
    wasserstein1_1d,
)
from advdens.sampling import SampleSet, rejection_sample
from advdens.spectral import (
    CoefficientField,
    density_eval,
    ellipsoid_norm,
    ellipsoid_weights,
    synth_density,
    uniform_density,
)


def random_field(rng, d, band, scale=0.3):
    return CoefficientField(d, band, "signed-measure", scale * rng.standard_normal((band + 1,) * d))


def brute_force_max_pairing(mu, nu, beta, L, n_cand, rng):
    """Max pairing over random ellipsoid-feasible discriminators.

    Mixes isotropic directions with tempered-witness directions
    delta * (1+||xi||^2)^{-b} for b near beta, all scaled onto the
    ellipsoid boundary; every candidate is feasible, so the max is a
    certified lower bound on the supremum.
    """
    delta = (mu.coeffs - nu.coeffs).ravel()
    w = ellipsoid_weights(mu.dim, mu.band, beta).ravel()
    half = n_cand // 2
    z1 = rng.standard_normal((half, delta.size))
    bpow = rng.uniform(0.7, 1.3, size=(n_cand - half, 1))
    noise = np.exp(0.05 * rng.standard_normal((n_cand - half, delta.size)))
    z2 = delta[None, :] * w[None, :] ** (-bpow) * noise
    z = np.vstack([z1, z2])
    norms = np.sqrt(np.sum(z**2 * w[None, :], axis=1))
    z = z[norms > 0] * (L / norms[norms > 0])[:, None]
    return float(np.max(z @ delta))


# --- sobolev_ipm ------------------------------------------------------------

def test_identical_measures_give_zero_and_zero_witness():
    fld = uniform_density(1, 3)
    res = sobolev_ipm(fld, fld, 1.0, 2.0)
    assert res.value == 0.0
    assert np.all(res.witness.coeffs == 0.0)


def test_single_difference_closed_form():
    a = CoefficientField(1, 1, "signed-measure", [1.0, 0.1])
    b = CoefficientField(1, 1, "signed-measure", [1.0, 0.0])
    res = sobolev_ipm(a, b, 2.0, 1.0)
    assert res.value == pytest.approx(0.1 / 2.0, abs=1e-14)


def test_closed_form_vs_brute_force():
    rng = np.random.default_rng(17)
    for _ in range(10):
        mu = random_field(rng, 2, 5)
        nu = random_field(rng, 2, 5)
        res = sobolev_ipm(mu, nu, 1.0, 1.5)
        best = brute_force_max_pairing(mu, nu, 1.0, 1.5, 10_000, rng)
        assert best <= res.value + 1e-10
        assert best >= res.value * 0.98


def test_witness_on_boundary_and_reproduces_value():
    rng = np.random.default_rng(18)
    mu, nu = random_field(rng, 1, 6), random_field(rng, 1, 6)
    res = sobolev_ipm(mu, nu, 0.5, 2.0)
    assert abs(ellipsoid_norm(res.witness, 0.5) - 2.0) < 1e-12
    assert abs(pairing(res.witness, mu, nu) - res.value) < 1e-12


def test_witness_optimal_against_perturbations():
    rng = np.random.default_rng(19)
    mu, nu = random_field(rng, 2, 3), random_field(rng, 2, 3)
    beta, L = 1.0, 1.0
    res = sobolev_ipm(mu, nu, beta, L)
    w = ellipsoid_weights(2, 3, beta)
    for _ in range(200):
        cand = res.witness.coeffs + 0.05 * rng.standard_normal((4, 4))
        norm = math.sqrt(float(np.sum(w * cand**2)))
        cand = cand * (L / norm)
        f = CoefficientField(2, 3, "discriminator", cand)
        assert pairing(f, mu, nu) <= res.value + 1e-12


def test_symmetry_and_band_padding():
    rng = np.random.default_rng(20)
    mu = random_field(rng, 1, 3)
    nu = random_field(rng, 1, 7)
    a = sobolev_ipm(mu, nu, 1.0, 1.0)
    b = sobolev_ipm(nu, mu, 1.0, 1.0)
    assert a.value == b.value
    assert a.witness.band == 7


def test_discriminator_band_cap():
    rng = np.random.default_rng(21)
    mu, nu = random_field(rng, 1, 8), random_field(rng, 1, 8)
    capped = sobolev_ipm(mu, nu, 1.0, 1.0, band=3)
    full = sobolev_ipm(mu, nu, 1.0, 1.0)
    assert capped.value <= full.value
    assert capped.active_band == 3
    assert np.all(capped.witness.coeffs[4:] == 0.0)


def test_triangle_inequality():
    rng = np.random.default_rng(22)
    for _ in range(50):
        a, b, c = (random_field(rng, 1, 5) for _ in range(3))
        dab = sobolev_ipm(a, b, 1.0, 1.0).value
        dbc = sobolev_ipm(b, c, 1.0, 1.0).value
        dac = sobolev_ipm(a, c, 1.0, 1.0).value
        assert dac <= dab + dbc + 1e-12


def test_scale_equivariance_exact():
    rng = np.random.default_rng(23)
    mu, nu = random_field(rng, 2, 4), random_field(rng, 2, 4)
    assert sobolev_ipm(mu, nu, 1.0, 2.0).value == 2.0 * sobolev_ipm(mu, nu, 1.0, 1.0).value


def test_monotone_in_beta():
    rng = np.random.default_rng(24)
    mu, nu = random_field(rng, 1, 6), random_field(rng, 1, 6)
    vals = [sobolev_ipm(mu, nu, b, 1.0).value for b in (0.0, 0.5, 1.0, 2.0, 3.0)]
    assert all(y <= x for x, y in zip(vals, vals[1:]))


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        sobolev_ipm(uniform_density(1, 2), uniform_density(2, 2), 1.0, 1.0)


# --- total variation --------------------------------------------------------

def test_tv_zero_for_identical():
    fld = uniform_density(1, 2)
    assert total_variation_band(fld, fld) == pytest.approx(0.0, abs=1e-14)


def test_tv_single_mode_against_quadrature_oracle():
    a = CoefficientField(1, 1, "density", [1.0, 0.1])
    b = uniform_density(1, 1)
    oracle, _ = quad(
        lambda t: 0.5 * abs(0.1 * math.sqrt(2.0) * math.cos(math.pi * t)), 0, 1,
        points=[0.5], limit=200,
    )
    got = total_variation_band(a, b, grid_resolution=1024)
    assert got == pytest.approx(oracle, abs=2e-7)
    assert got == pytest.approx(0.1 * math.sqrt(2.0) / math.pi, abs=2e-7)


def test_tv_below_half_l2():
    rng = np.random.default_rng(25)
    for _ in range(100):
        d = int(rng.integers(1, 3))
        a = random_field(rng, d, 3, scale=0.2)
        b = random_field(rng, d, 3, scale=0.2)
        l2 = math.sqrt(float(np.sum((a.coeffs - b.coeffs) ** 2)))
        assert total_variation_band(a, b, grid_resolution=64) <= 0.5 * l2 + 1e-10


# --- Wasserstein-1 ----------------------------------------------------------

def test_w1_identical_inputs():
    s = SampleSet(1, np.array([[0.1], [0.4]]), 0, "manual")
    assert wasserstein1_1d(s, s) == 0.0
    fld = uniform_density(1, 1)
    assert wasserstein1_1d(fld, fld) == pytest.approx(0.0, abs=1e-12)


def test_w1_point_masses():
    a = SampleSet(1, np.array([[0.2]]), 0, "a")
    b = SampleSet(1, np.array([[0.5]]), 0, "b")
    assert wasserstein1_1d(a, b) == pytest.approx(0.3, abs=1e-15)


def test_w1_density_vs_empirical_cross_check():
    dens = CoefficientField(1, 1, "density", [1.0, 0.1])
    unif = uniform_density(1, 1)
    by_cdf = wasserstein1_1d(unif, dens)
    # analytic: integral |0.1 sqrt2 sin(pi x)/pi| dx = 0.2 sqrt2 / pi^2
    assert by_cdf == pytest.approx(0.2 * math.sqrt(2.0) / math.pi**2, abs=1e-8)
    samples = rejection_sample(dens, 10**5, seed=26).sample_set
    uniform_samples = rejection_sample(unif, 10**5, seed=27).sample_set
    by_samples = wasserstein1_1d(samples, uniform_samples)
    assert abs(by_samples - by_cdf) < 5e-3
    mixed = wasserstein1_1d(samples, unif)
    assert abs(mixed - by_cdf) < 5e-3


def test_w1_rejects_dim_2():
    with pytest.raises(ValueError):
        wasserstein1_1d(uniform_density(2, 1), uniform_density(2, 1))


# --- Lipschitz constants ----------------------------------------------------

def test_lipschitz_constant_function():
    rep = lipschitz_norm_report(np.full((33, 33), 2.5))
    assert rep.lip_inf == rep.lip_2 == rep.lip_1 == 0.0
    assert rep.sup_norm == 2.5


def test_lipschitz_linear_function_analytic():
    xs = np.linspace(0.0, 1.0, 101)
    vals = xs[:, None] + xs[None, :]
    rep = lipschitz_norm_report(vals)
    assert rep.lip_1 == pytest.approx(1.0, abs=1e-6)
    assert rep.lip_2 == pytest.approx(math.sqrt(2.0), abs=1e-6)
    assert rep.lip_inf == pytest.approx(2.0, abs=1e-6)


def test_lipschitz_ordering_chain_on_random_fields():
    rng = np.random.default_rng(28)
    xs = np.linspace(0.0, 1.0, 51)
    grid = np.stack(np.meshgrid(xs, xs, indexing="ij"), axis=-1).reshape(-1, 2)
    for _ in range(50):
        fld = random_field(rng, 2, 3)
        vals = density_eval(fld, grid).reshape(51, 51)
        rep = lipschitz_norm_report(vals)
        assert rep.lip_1 <= rep.lip_2 + 1e-12
        assert rep.lip_2 <= rep.lip_inf + 1e-12
        assert rep.lip_inf <= 2 * rep.lip_1 + 1e-9


def test_lipschitz_degenerate_grid():
    with pytest.raises(ValueError):
        lipschitz_norm_report(np.array([1.0]))
