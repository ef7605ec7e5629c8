import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ruelle_lab import alphabet as al
from ruelle_lab import potential as pot
from ruelle_lab.symbolic import Sequence, concat, constant, periodic, shift
from ruelle_lab.transfer import solve


def test_eval_examples(two, ising1):
    assert pot.constant(two, 0.7)(periodic((0, 1))) == 0.7
    assert ising1(constant(0)) == 1.0
    for y in (constant(0), constant(1), periodic((1, 0))):
        assert ising1(concat((0, 1, 1), y)) == -1.0


def test_birkhoff_examples(two, ising1):
    assert pot.birkhoff_sum(pot.constant(two, 1.5), 5, constant(0)) == pytest.approx(7.5)
    assert pot.birkhoff_sum(ising1, 0, constant(0)) == 0.0
    # three pair terms of alternating spins, each -1
    assert pot.birkhoff_sum(ising1, 3, periodic((0, 1))) == -3.0


seqs = st.builds(Sequence, st.lists(st.integers(0, 2), max_size=6).map(tuple),
                 st.lists(st.integers(0, 2), min_size=1, max_size=3).map(tuple))


@settings(max_examples=60, deadline=None)
@given(seqs, st.integers(0, 8), st.integers(0, 8), st.integers(0, 50))
def test_cocycle(x, n, m, seed):
    f = pot.random_potential(al.uniform_finite(3), seed, depth=3)
    lhs = pot.birkhoff_sum(f, n + m, x)
    rhs = pot.birkhoff_sum(f, n, x) + pot.birkhoff_sum(f, m, shift(x, n))
    assert abs(lhs - rhs) < 1e-12


def test_vectorized_birkhoff_matches_scalar():
    A = al.uniform_finite(3)
    f = pot.random_potential(A, 3, depth=3)
    from ruelle_lab.symbolic import word_array
    W = word_array(3, 4)
    sums = pot.birkhoff_sums(f, W, (2, 1))
    for row, s in zip(W, sums):
        assert s == pytest.approx(pot.birkhoff_sum(f, 4, Sequence(tuple(int(a) for a in row) + (2, 1), (0,))), abs=1e-13)


def brute_variation(f, j):
    m, k = f.alphabet.size, f.depth
    best = 0.0
    for u in itertools.product(range(m), repeat=k):
        for v in itertools.product(range(m), repeat=k):
            if u[:j] == v[:j]:
                best = max(best, abs(f.values[u] - f.values[v]))
    return best


def test_variation_examples(ising1):
    assert pot.variation(ising1, 0) == 2.0
    assert pot.variation(ising1, 1) == 2.0
    assert pot.variation(ising1, 2) == 0.0
    assert pot.variation(ising1, 5) == 0.0


@pytest.mark.parametrize("seed", range(4))
def test_variation_matches_brute_force(seed):
    f = pot.random_potential(al.uniform_finite(3), seed, depth=3)
    for j in range(4):
        assert pot.variation(f, j) == pytest.approx(brute_variation(f, j), abs=1e-14)


def brute_walters(f, n_max, j, tail_len):
    """Direct search over prefixes a in A^n and tails of length tail_len agreeing on j sites."""
    m = f.alphabet.size
    best = 0.0
    tails = list(itertools.product(range(m), repeat=tail_len))
    for n in range(1, n_max + 1):
        for a in itertools.product(range(m), repeat=n):
            for x in tails:
                for y in tails:
                    if x[:j] != y[:j]:
                        continue
                    sx = pot.birkhoff_sum(f, n, Sequence(a + x, (0,)))
                    sy = pot.birkhoff_sum(f, n, Sequence(a + y, (0,)))
                    best = max(best, abs(sx - sy))
    return best


def test_walters_examples(two, ising1):
    assert pot.walters_modulus(ising1, 8, 0) == 2.0
    assert pot.walters_modulus(ising1, 8, 1) == 0.0
    assert pot.walters_modulus(pot.constant(two, 3.0, depth=2), 8, 0) == 0.0
    assert brute_walters(ising1, 8, 0, 2) == 2.0


@pytest.mark.parametrize("seed", range(3))
def test_walters_matches_brute_force_depth3(seed):
    f = pot.random_potential(al.uniform_finite(2), seed, depth=3)
    for j in range(4):
        expected = brute_walters(f, 5, j, 3)
        assert pot.walters_modulus(f, 5, j) == pytest.approx(expected, abs=1e-13)


def test_walters_nonincreasing_in_j():
    f = pot.random_potential(al.uniform_finite(3), 11, depth=4)
    vals = [pot.walters_modulus(f, 6, j) for j in range(5)]
    assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))
    assert vals[3] == 0.0


@pytest.mark.parametrize("seed", range(5))
def test_boundary_dependence_bounded_by_variation(seed):
    A = al.uniform_finite(3)
    f = pot.random_potential(A, seed, depth=2)
    var1 = pot.variation(f, 1)
    for n in (1, 3, 6):
        for w in itertools.product(range(3), repeat=n):
            vals = [pot.birkhoff_sum(f, n, concat(w, constant(b))) for b in range(3)]
            assert max(vals) - min(vals) <= var1 + 1e-13


def test_depth_project_exact_and_substitution(two, ising1):
    g = pot.depth_project(ising1, two, 2, constant(1))
    np.testing.assert_array_equal(g.values, ising1.values)

    def geometric(x):
        return 0.5 * x[0] + 0.25 * x[1] + 0.125 * x[2]

    f2 = pot.depth_project(geometric, two, 2)
    for a, b in itertools.product(range(2), repeat=2):
        assert f2.values[a, b] == 0.5 * a + 0.25 * b


def test_projection_pressure_error_bounded_by_variation():
    A = al.uniform_finite(2)
    s = al.spins(A)

    def decaying(x):
        return sum(2.0 ** -(i + 1) * s[x[i]] for i in range(14))

    ks = range(2, 7)
    proj = [pot.depth_project(decaying, A, k) for k in ks]
    for k, fk, fk1 in zip(ks, proj, proj[1:]):
        gap = abs(solve(fk).log_lambda - solve(fk1).log_lambda)
        # |f_k - f_{k+1}| <= var_k(f_{k+1}) pointwise, and pressure is 1-Lipschitz in sup norm
        assert gap <= pot.variation(fk1, k) + 1e-12


def test_json_roundtrip(two):
    f = pot.random_potential(two, 5, depth=3)
    g = pot.Potential.from_dict(f.to_dict())
    np.testing.assert_array_equal(f.values, g.values)
    assert f.to_dict()["values"] == f.flat.tolist()


def test_arithmetic_lifts(two, ising1):
    h = ising1 + pot.constant(two, 1.0)
    assert h.depth == 2
    np.testing.assert_allclose(h.values, ising1.values + 1)
    np.testing.assert_allclose((2 * ising1).values, 2 * ising1.values)
    assert ising1.lift(3).values[0, 1, 1] == ising1.values[0, 1]
