import itertools
import math

import numpy as np
import pytest

from ruelle_lab import alphabet as al
from ruelle_lab import potential as pot

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def two():
    return al.uniform_finite(2)


@pytest.fixture
def ising1(two):
    return pot.ising(two, 1.0)


def brute_cylinder(pi, pair, word):
    """Chain formula evaluated with plain floats: pi[w_n] * prod pair[w_i, w_{i+1}] / pi[w_{i+1}]."""
    w = pi[word[-1]]
    for a, b in zip(word[:-1], word[1:]):
        if pi[b] == 0:
            return 0.0
        w *= pair[a][b] / pi[b]
    return w


def brute_birkhoff(values, word_and_tail, n, k):
    return sum(values[tuple(word_and_tail[j:j + k])] for j in range(n))


def ising_gibbs_pair(beta):
    """Closed-form pair weights of the symmetric two-spin Gibbs measure."""
    z = 4 * math.cosh(beta)
    return [[math.exp(beta) / z, math.exp(-beta) / z], [math.exp(-beta) / z, math.exp(beta) / z]]


def words(m, n):
    return list(itertools.product(range(m), repeat=n))
