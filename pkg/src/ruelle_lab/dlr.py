"""Finite-volume kernels of a normalized potential and DLR consistency.

For a normalized depth-k potential the kernel on the first n sites is

    gamma_n(w | y) = prod_i p(w_i) * exp(S_n fbar(w y_{n+1} y_{n+2} ...)),

which only sees the boundary window ``y_{n+1} .. y_{n+k-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, InvalidArgument, check_budget
from .potential import Potential, birkhoff_sums
from .symbolic import Sequence, word_array
from .transfer import normalization_residual

NORMALIZATION_TOL = 1e-9


def _require_normalized(fbar: Potential, tol: float) -> None:
    res = normalization_residual(fbar)
    if res > tol:
        raise ContractViolation(f"kernel needs a normalized potential (max |L1 - 1| = {res:.2e})")


def _log_prior(fbar: Potential, words: np.ndarray) -> np.ndarray:
    return np.log(fbar.alphabet.weights)[words].sum(axis=1)


@dataclass(frozen=True, eq=False)
class GibbsKernel:
    """``gamma_n`` for every boundary window; ``weights[u]`` is the law of the first n sites."""

    fbar: Potential
    n: int
    weights: np.ndarray  # shape (m**(k-1), m**n)

    @property
    def window(self) -> int:
        return max(self.fbar.depth - 1, 0)

    def given(self, y: Sequence) -> np.ndarray:
        m = self.fbar.alphabet.size
        idx = 0
        for s in y.take(self.window, start=self.n):
            idx = idx * m + s
        return self.weights[idx]


def gamma(fbar: Potential, n: int, y: Sequence, tol: float = NORMALIZATION_TOL) -> np.ndarray:
    """Kernel weights of all words of length ``n`` given the boundary point ``y``."""
    if n < 1:
        raise InvalidArgument("volume size must be >= 1")
    _require_normalized(fbar, tol)
    m = fbar.alphabet.size
    check_budget(m, n)
    words = word_array(m, n)
    tail = y.take(fbar.depth - 1, start=n)
    return np.exp(_log_prior(fbar, words) + birkhoff_sums(fbar, words, tail))


def kernel(fbar: Potential, n: int, tol: float = NORMALIZATION_TOL) -> GibbsKernel:
    """``gamma_n`` tabulated over every boundary window of length depth-1."""
    if n < 1:
        raise InvalidArgument("volume size must be >= 1")
    _require_normalized(fbar, tol)
    m = fbar.alphabet.size
    r = fbar.depth - 1
    check_budget(m, n + r)
    words = word_array(m, n)
    prior = _log_prior(fbar, words)
    tails = word_array(m, r)
    W = np.stack([np.exp(prior + birkhoff_sums(fbar, words, t)) for t in tails])
    return GibbsKernel(fbar, n, W)


def mu_gamma(mu, fbar: Potential, n: int) -> np.ndarray:
    """``int gamma_n(. | y) dmu(y)`` on cylinders of length n.

    By shift invariance the boundary window ``y_{n+1} .. y_{n+k-1}`` is
    distributed as the (k-1)-marginal of ``mu``.
    """
    K = kernel(fbar, n)
    boundary = mu.cylinder_weights(K.window)
    return boundary @ K.weights


def dlr_check(mu, fbar: Potential, n: int) -> float:
    """Total-variation distance between ``mu gamma_n`` and ``mu`` on the first n sites."""
    return 0.5 * float(np.sum(np.abs(mu_gamma(mu, fbar, n) - mu.cylinder_weights(n))))


def quasilocality_gap(fbar: Potential, n: int, phi: Potential, probe_depth: int,
                      tol: float = NORMALIZATION_TOL) -> float:
    """Sensitivity of ``int phi dgamma_n(. | y)`` to boundary coordinates past ``probe_depth``.

    Maximum over boundaries y, y' agreeing on sites n+1 .. n+probe_depth of
    the difference of kernel expectations of the local function ``phi``.
    """
    if n < 1 or probe_depth < 0:
        raise InvalidArgument("need n >= 1 and probe_depth >= 0")
    if phi.alphabet.size != fbar.alphabet.size:
        raise InvalidArgument("phi and fbar live on different alphabets")
    _require_normalized(fbar, tol)
    m = fbar.alphabet.size
    r = fbar.depth - 1
    d = phi.depth
    L = max(r, d - n, probe_depth)
    if probe_depth >= L:
        return 0.0
    check_budget(m, n + L)
    words = word_array(m, n)
    prior = _log_prior(fbar, words)
    powers = m ** np.arange(d - 1, -1, -1, dtype=np.int64)
    expectations = np.empty(m**L)
    for i, window in enumerate(word_array(m, L)):
        w = np.exp(prior + birkhoff_sums(fbar, words, window))
        ext = np.concatenate([words, np.broadcast_to(window, (words.shape[0], L))], axis=1)
        expectations[i] = float(np.dot(w, phi.flat[ext[:, :d] @ powers]))
    groups = expectations.reshape(m**probe_depth, -1)
    return float(np.max(groups.max(axis=1) - groups.min(axis=1)))
