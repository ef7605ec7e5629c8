import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ruelle_lab import alphabet as al
from ruelle_lab import dlr
from ruelle_lab import measures as ms
from ruelle_lab import potential as pot
from ruelle_lab import transfer as tr
from ruelle_lab.errors import ContractViolation, InvalidArgument
from ruelle_lab.symbolic import Sequence, constant, periodic


def normalized(A, seed, depth=2):
    f = pot.random_potential(A, seed, depth=depth)
    return tr.normalize(f, tr.solve(f))


def brute_gamma(fbar, n, y):
    """prod_i p_{w_i} exp(sum_j fbar(w_j .. w_{j+k-1})) with the boundary y glued after w."""
    m, k = fbar.alphabet.size, fbar.depth
    p = fbar.alphabet.weights
    tail = y.take(k - 1, start=n)
    out = []
    for w in itertools.product(range(m), repeat=n):
        x = w + tail
        prior = math.prod(p[a] for a in w)
        s = sum(fbar.values[x[j:j + k]] for j in range(n))
        out.append(prior * math.exp(s))
    return np.array(out)


def test_ising_single_site():
    f = pot.ising(al.uniform_finite(2), 1.0)
    fbar = tr.normalize(f, tr.solve(f))
    g = dlr.gamma(fbar, 1, constant(0))
    e = math.exp(1)
    np.testing.assert_allclose(g, [e / (e + 1 / e), (1 / e) / (e + 1 / e)], atol=1e-15)


@pytest.mark.parametrize("m,k,n", [(2, 2, 4), (3, 2, 3), (2, 3, 4), (3, 3, 2)])
def test_gamma_matches_brute_force_and_is_proper(m, k, n):
    A = al.finite(np.arange(1, m + 1))
    fbar = normalized(A, m * 10 + k, depth=k)
    y = Sequence((m - 1,), (0, 1))
    g = dlr.gamma(fbar, n, y)
    np.testing.assert_allclose(g, brute_gamma(fbar, n, y), rtol=1e-12)
    assert abs(g.sum() - 1) < 1e-12
    K = dlr.kernel(fbar, n)
    np.testing.assert_allclose(K.given(y), g, rtol=1e-13)


def test_gamma_requires_normalized():
    f = pot.ising(al.uniform_finite(2), 1.0)
    with pytest.raises(ContractViolation):
        dlr.gamma(f, 2, constant(0))
    fbar = tr.normalize(f, tr.solve(f))
    with pytest.raises(InvalidArgument):
        dlr.gamma(fbar, 0, constant(0))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 1000), st.integers(2, 5), st.integers(1, 4), st.integers(0, 2), st.integers(0, 2))
def test_kernel_consistency(seed, n, m_inner, y0, y1):
    """gamma_n gamma_m = gamma_n for m <= n, by direct composition."""
    m_inner = min(m_inner, n)
    A = al.uniform_finite(3)
    fbar = normalized(A, seed)
    y = Sequence((y0, y1), (0,))
    outer = dlr.gamma(fbar, n, y)
    outer_t = outer.reshape((3,) * n)
    composed = np.zeros_like(outer_t)
    for w in itertools.product(range(3), repeat=n):
        # boundary of the inner kernel: w_{m+1..n} then y, placed from site m on
        inner_y = Sequence((0,) * m_inner + tuple(w[m_inner:]) + y.take(3, start=n), (0,))
        inner = dlr.gamma(fbar, m_inner, inner_y).reshape((3,) * m_inner)
        outside = outer_t[(slice(None),) * m_inner + tuple(w[m_inner:])].sum()
        composed[w] = inner[w[:m_inner]] * outside
    np.testing.assert_allclose(composed, outer_t, atol=1e-14)


@pytest.mark.parametrize("seed", range(3))
def test_gibbs_measure_is_dlr(seed):
    A = al.uniform_finite(2 + seed % 2)
    fbar = normalized(A, seed, depth=2 + seed % 2)
    mu = ms.gibbs_from_normalized(fbar)
    for n in range(1, 7):
        assert dlr.dlr_check(mu, fbar, n) <= 1e-12


def test_non_gibbs_measures_fail_dlr():
    A = al.uniform_finite(2)
    f = pot.ising(A, 1.0)
    fbar = tr.normalize(f, tr.solve(f))
    assert dlr.dlr_check(ms.product_measure(A), fbar, 3) >= 0.01
    assert dlr.dlr_check(ms.random_markov(A, 4), fbar, 2) > 1e-6


def test_mu_gamma_is_probability():
    A = al.uniform_finite(3)
    fbar = normalized(A, 1)
    mg = dlr.mu_gamma(ms.random_markov(A, 9), fbar, 3)
    assert abs(mg.sum() - 1) < 1e-13 and np.all(mg >= 0)


def test_quasilocality():
    A = al.uniform_finite(2)
    f = pot.ising(A, 1.0)
    fbar = tr.normalize(f, tr.solve(f))
    phi = pot.Potential(A, np.array([1.0, -1.0]))
    # depth-2 kernels only see the first boundary site
    assert dlr.quasilocality_gap(fbar, 3, phi.lift(2), 1) == 0.0
    assert dlr.quasilocality_gap(fbar, 1, phi, 0) > 0.1
    assert dlr.quasilocality_gap(fbar, 3, phi, 0) < dlr.quasilocality_gap(fbar, 1, phi, 0)
    assert dlr.quasilocality_gap(fbar, 2, phi.lift(4), 2) == 0.0


def test_telescoping_relative_entropy_cesaro():
    """H_n(mu | gamma_n(.|y)) / n approaches the rate against the Gibbs measure within C / n.

    C is fixed in advance: the boundary term of a depth-2 kernel against the
    Gibbs chain is at most D = max |log(pi(b) / (p_b exp fbar(b c)))|, and the
    chain part is affine, H_n(mu | mu_f) = H_1 + (n - 1) h.
    """
    from ruelle_lab.entropy import kernel_entropy_identity, relative_entropy_rate, relative_entropy_volume
    A = al.uniform_finite(2)
    f = pot.random_potential(A, 2)
    S = tr.solve(f)
    fbar = tr.normalize(f, S)
    mu_f = ms.gibbs_from_normalized(fbar)
    mu = ms.random_markov(A, 3)
    h = relative_entropy_rate(mu, f, S)
    D = float(np.max(np.abs(np.log(mu_f.pi)[:, None] - np.log(A.weights)[:, None] - fbar.values)))
    C = D + abs(relative_entropy_volume(mu, mu_f, 1) - h)
    y = periodic((1, 0))
    for n in (1, 2, 4, 8, 12, 16):
        rate = kernel_entropy_identity(mu, fbar, y, n)["lhs"] / n
        assert abs(rate - h) <= C / n + 1e-13
