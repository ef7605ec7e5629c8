import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import ising_gibbs_pair
from ruelle_lab import alphabet as al
from ruelle_lab import entropy as en
from ruelle_lab import measures as ms
from ruelle_lab import potential as pot
from ruelle_lab import transfer as tr
from ruelle_lab.symbolic import constant, periodic


def ising_measure(beta):
    f = pot.ising(al.uniform_finite(2), beta)
    S = tr.solve(f)
    return f, S, ms.gibbs_from_normalized(tr.normalize(f, S))


def binary_entropy(q):
    return -q * math.log(q) - (1 - q) * math.log(1 - q)


def test_product_measure_has_zero_entropy():
    A = al.finite([1, 2, 3])
    p = ms.product_measure(A)
    for n in (1, 3, 6):
        assert abs(en.volume_entropy(p, A, n)) < 1e-14
    assert abs(en.specific_entropy_markov(p)) < 1e-15


def test_dirac_entropy():
    A = al.uniform_finite(2)
    d = ms.dirac_constant(A)
    rep = en.specific_entropy_limit(d, A, 6)
    np.testing.assert_allclose(rep.H_n, [-n * math.log(2) for n in range(1, 7)], atol=1e-14)
    assert rep.extrapolated_limit == pytest.approx(-math.log(2), abs=1e-14)


def test_ising_two_site_entropy():
    _, _, mu = ising_measure(1.0)
    pair = ising_gibbs_pair(1.0)
    H2 = sum(q * math.log(q / 0.25) for row in pair for q in row)
    assert en.relative_entropy_volume(mu, ms.product_measure(mu.alphabet), 2) == pytest.approx(H2, abs=1e-14)
    assert en.relative_entropy_volume(mu, ms.product_measure(mu.alphabet), 1) == pytest.approx(0.0, abs=1e-15)
    assert en.specific_entropy_markov(mu) == pytest.approx(-H2, abs=1e-14)


@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
def test_ks_closed_form(beta):
    _, _, mu = ising_measure(beta)
    q = math.exp(beta) / (2 * math.cosh(beta))
    assert en.kolmogorov_sinai_markov(mu) == pytest.approx(binary_entropy(q), abs=1e-13)
    assert en.specific_entropy_markov(mu) + math.log(2) == pytest.approx(binary_entropy(q), abs=1e-13)


@pytest.mark.parametrize("seed", range(5))
def test_specific_entropy_against_ks_with_prior(seed):
    A = al.finite([1.0, 2.0, 5.0])
    mu = ms.random_markov(A, seed)
    expected = en.kolmogorov_sinai_markov(mu) + float(np.dot(mu.pi, np.log(A.weights)))
    assert en.specific_entropy_markov(mu) == pytest.approx(expected, abs=1e-13)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 2))
def test_markov_entropy_affine_and_monotone(seed, order):
    A = al.uniform_finite(3)
    mu = ms.random_markov(A, seed, order=order)
    rep = en.specific_entropy_limit(mu, A, 7)
    H = np.array(rep.H_n)
    assert np.all(H <= 1e-14)
    # relative entropy grows with the volume
    assert np.all(np.diff(-H) >= -1e-13)
    assert np.max(np.abs(en.second_differences(H)[order - 1:])) <= 1e-12
    assert rep.extrapolated_limit == pytest.approx(rep.closed_form, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.05, 0.95), st.integers(1, 6))
def test_volume_entropy_concave_on_mixtures(seed, t, n):
    A = al.uniform_finite(2)
    mu, nu = ms.random_markov(A, seed), ms.random_markov(A, seed + 1, order=2)
    mix = ms.Mixture([mu, nu], [t, 1 - t])
    lhs = en.volume_entropy(mix, A, n)
    rhs = t * en.volume_entropy(mu, A, n) + (1 - t) * en.volume_entropy(nu, A, n)
    assert lhs >= rhs - 1e-13
    # the concavity excess is at most the entropy of the mixing coin, so rates are affine in the limit
    assert lhs - rhs <= binary_entropy(t) + 1e-13


def test_infinite_relative_entropy_flagged():
    A = al.uniform_finite(2)
    p = ms.product_measure(A)
    d = ms.dirac_constant(A)
    assert en.relative_entropy_volume(p, d, 2) == math.inf
    rep = en.relative_entropy_rate_empirical(p, d, 4)
    assert rep.infinite and rep.extrapolated_limit == math.inf
    assert en.relative_entropy_volume(d, p, 3) == pytest.approx(3 * math.log(2))


@pytest.mark.parametrize("seed", range(4))
def test_rate_formula_matches_increments(seed):
    A = al.uniform_finite(2 + seed % 2)
    f = pot.random_potential(A, seed)
    S = tr.solve(f)
    mu_f = ms.gibbs_from_normalized(tr.normalize(f, S))
    mu = ms.random_markov(A, seed + 50)
    rep = en.relative_entropy_rate_empirical(mu, mu_f, 10)
    assert rep.extrapolated_limit == pytest.approx(en.relative_entropy_rate(mu, f, S), abs=1e-10)
    assert en.relative_entropy_rate(mu_f, f, S) == pytest.approx(0.0, abs=1e-12)


def test_zero_potential_rate_is_minus_specific_entropy():
    A = al.finite([1, 4])
    f = pot.constant(A, 0.0, depth=2)
    mu = ms.random_markov(A, 1)
    S = tr.solve(f)
    assert en.relative_entropy_rate(mu, f, S) == pytest.approx(-en.specific_entropy_markov(mu), abs=1e-14)


@pytest.mark.parametrize("seed", range(4))
def test_kernel_identity(seed):
    A = al.uniform_finite(2 + seed % 2)
    f = pot.random_potential(A, seed, depth=2 + seed // 2)
    fbar = tr.normalize(f, tr.solve(f))
    mu = ms.random_markov(A, seed + 10, order=1 + seed % 2)
    for n in range(1, 8):
        row = en.kernel_entropy_identity(mu, fbar, periodic((1, 0, 0)), n)
        assert row["residual"] <= 1e-12
        assert row["lhs"] >= -1e-13


def test_kernel_entropy_boundary_effect_bounded():
    """|H_n(mu|gamma_n(.|y)) - H_n(mu|mu_f)| <= max |log(pi(b) / (p_b exp fbar(b c)))| for depth 2."""
    A = al.finite([1.0, 3.0])
    f = pot.random_potential(A, 8)
    S = tr.solve(f)
    fbar = tr.normalize(f, S)
    mu_f = ms.gibbs_from_normalized(fbar)
    C = float(np.max(np.abs(np.log(mu_f.pi)[:, None] - np.log(A.weights)[:, None] - fbar.values)))
    mu = ms.random_markov(A, 2)
    for y in (constant(0), constant(1)):
        for n in range(1, 10):
            lhs = en.kernel_entropy_identity(mu, fbar, y, n)["lhs"]
            assert abs(lhs - en.relative_entropy_volume(mu, mu_f, n)) <= C + 1e-12


def test_report_serialization():
    _, _, mu = ising_measure(1.0)
    rep = en.specific_entropy_limit(mu, mu.alphabet, 4)
    lines = rep.to_csv().strip().splitlines()
    assert lines[0] == "n,H_n,rate,residual"
    assert len(lines) == 5
    assert lines[1].split(",")[1] == "0"
    d = rep.to_dict()
    assert d["infinite"] is False and len(d["H_n"]) == 4
