"""Shift-invariant Markov measures on the one-sided shift.

A measure of order r is determined by its weights on cylinders of length
r+1 (``block``); longer cylinders follow from prepending symbols,

    mu[a w] = mu[w] * block[a w_1..w_r] / mu[w_1..w_r],

which is the orientation of the eigenmeasure equation of the normalized
transfer operator. Order 1 is the pair-Markov case (``pi``, ``pair``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .alphabet import Alphabet
from .errors import ContractViolation, InvalidArgument, NonConvergence, check_budget
from .potential import Potential
from .transfer import build

MEASURE_TOL = 1e-12


def _stationary(P: np.ndarray, tol: float = 1e-14, max_iter: int = 100_000) -> np.ndarray:
    """Stationary row vector of a row-stochastic matrix (repeated squaring, then power steps)."""
    Q = P.copy()
    for _ in range(64):
        Q2 = Q @ Q
        Q2 = Q2 / Q2.sum(axis=1, keepdims=True)
        change = np.max(np.abs(Q2 - Q))
        Q = Q2
        if change <= tol:
            break
    pi = Q.mean(axis=0)
    pi = pi / pi.sum()
    for it in range(max_iter):
        nxt = pi @ P
        nxt = nxt / nxt.sum()
        if np.max(np.abs(nxt - pi)) <= tol * np.max(nxt):
            return nxt
        pi = nxt
    raise NonConvergence("stationary distribution did not converge", float(np.max(np.abs(pi @ P - pi))), max_iter)


@dataclass(frozen=True, eq=False)
class MarkovMeasure:
    alphabet: Alphabet
    block: np.ndarray

    def __post_init__(self):
        b = np.array(self.block, dtype=float)
        m = self.alphabet.size
        if b.ndim < 2 or b.shape != (m,) * b.ndim:
            raise InvalidArgument(f"block tensor shape {b.shape} does not match alphabet size {m}")
        if np.any(b < 0) or not np.all(np.isfinite(b)):
            raise InvalidArgument("cylinder weights must be finite and nonnegative")
        if abs(b.sum() - 1.0) > MEASURE_TOL:
            raise InvalidArgument(f"cylinder weights sum to {b.sum()!r}, expected 1")
        gap = np.max(np.abs(b.sum(axis=0) - b.sum(axis=-1)))
        if gap > MEASURE_TOL:
            raise InvalidArgument(f"block weights are not shift invariant (gap {gap:.2e})")
        b.setflags(write=False)
        object.__setattr__(self, "block", b)

    @classmethod
    def from_pair(cls, alphabet: Alphabet, pair) -> "MarkovMeasure":
        return cls(alphabet, np.asarray(pair, dtype=float))

    @property
    def order(self) -> int:
        return self.block.ndim - 1

    @property
    def pi(self) -> np.ndarray:
        return self.marginal(1)

    @property
    def pair(self) -> np.ndarray:
        return self.marginal(2).reshape(self.alphabet.size, self.alphabet.size)

    def marginal(self, n: int) -> np.ndarray:
        """Weights of all cylinders of length ``n`` as a flat lexicographic vector."""
        return cylinder_weights(self, n)

    def cylinder_weights(self, n: int) -> np.ndarray:
        return cylinder_weights(self, n)

    def to_dict(self) -> dict:
        out = {"pi": self.pi.tolist(), "pair": self.pair.tolist()}
        if self.order > 1:
            out["order"] = self.order
            out["block"] = self.block.reshape(-1).tolist()
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict, alphabet: Alphabet) -> "MarkovMeasure":
        if "block" in data:
            r = int(data["order"])
            return cls(alphabet, np.asarray(data["block"], dtype=float).reshape((alphabet.size,) * (r + 1)))
        return cls.from_pair(alphabet, data["pair"])


@dataclass(frozen=True, eq=False)
class Mixture:
    """Convex combination of shift-invariant measures, evaluated on cylinders."""

    components: tuple
    coefficients: tuple

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        if len(self.components) != c.size or np.any(c < 0) or abs(c.sum() - 1) > 1e-12:
            raise InvalidArgument("mixture coefficients must be a probability vector")

    @property
    def alphabet(self) -> Alphabet:
        return self.components[0].alphabet

    def cylinder_weights(self, n: int) -> np.ndarray:
        return sum(t * mu.cylinder_weights(n) for t, mu in zip(self.coefficients, self.components))


def _backward_kernel(mu: MarkovMeasure) -> np.ndarray:
    """``T[a, u] = block[a u] / mu[u]`` with 0 where ``mu[u] = 0``; shape (m, m**r)."""
    m = mu.alphabet.size
    r = mu.order
    tail = mu.block.sum(axis=0).reshape(-1)
    blk = mu.block.reshape(m, m**r)
    with np.errstate(divide="ignore", invalid="ignore"):
        T = np.where(tail[None, :] > 0, blk / np.where(tail > 0, tail, 1.0)[None, :], 0.0)
    return T


def cylinder_weights(mu: MarkovMeasure, n: int) -> np.ndarray:
    m = mu.alphabet.size
    r = mu.order
    if n < 0:
        raise InvalidArgument("cylinder length must be >= 0")
    check_budget(m, n)
    if n <= r + 1:
        return mu.block.sum(axis=tuple(range(n, r + 1))).reshape(-1)
    T = _backward_kernel(mu)
    W = mu.block.reshape(-1)
    for length in range(r + 1, n):
        W = (T[:, :, None] * W.reshape(m**r, m ** (length - r))[None, :, :]).reshape(-1)
    return W


def cylinder_weight(mu: MarkovMeasure, word) -> float:
    word = tuple(int(a) for a in word)
    n = len(word)
    if n < 1:
        raise InvalidArgument("cylinder word must be nonempty")
    r = mu.order
    if n <= r + 1:
        return float(mu.block.sum(axis=tuple(range(n, r + 1)))[word])
    tail = mu.block.sum(axis=0)
    w = float(mu.block[word[n - r - 1:]])
    for i in range(n - r - 2, -1, -1):
        denom = float(tail[word[i + 1:i + 1 + r]])
        if denom == 0.0:
            return 0.0
        w *= float(mu.block[word[i:i + r + 1]]) / denom
    return w


def product_measure(alphabet: Alphabet) -> MarkovMeasure:
    p = alphabet.weights
    return MarkovMeasure(alphabet, np.outer(p, p))


def gibbs_from_normalized(fbar: Potential, tol: float = 1e-9) -> MarkovMeasure:
    """The fixed point of the dual of a normalized transfer operator.

    The kernel columns are rescaled by the measured ``L 1`` so the measure is
    exactly consistent; inputs whose normalization residual exceeds ``tol``
    are rejected.
    """
    g = fbar.lift(max(fbar.depth, 2))
    M = build(g).entries
    colsum = M.sum(axis=1)
    residual = float(np.max(np.abs(colsum - 1.0)))
    if residual > tol:
        raise ContractViolation(f"potential is not normalized (max |L1 - 1| = {residual:.2e})")
    stoch = M / colsum[:, None]
    # nu is stationary for stoch^T acting on the right, i.e. nu stoch = nu as a row vector
    nu = _stationary(stoch)
    m = g.alphabet.size
    r = g.depth - 1
    # block[a u] = p_a exp(fbar(a u)) nu[u] / (L 1)(u)
    ext = (g.alphabet.weights.reshape((m,) + (1,) * r) * np.exp(g.values)).reshape(m, m**r)
    blk = ext / colsum[None, :] * nu[None, :]
    blk = blk / blk.sum()
    return MarkovMeasure(g.alphabet, blk.reshape((m,) * (r + 1)))


def integrate_local(mu, f: Potential) -> float:
    """``int f dmu`` for a depth-k potential via the k-cylinder weights."""
    return float(np.dot(mu.cylinder_weights(f.depth), f.flat))


def recursion_residual(mu: MarkovMeasure, fbar: Potential, n: int) -> float:
    """``max_w |mu[a0 w] - p_a0 exp(fbar(a0 w)) mu[w]|`` over words of length n >= depth-1."""
    m = mu.alphabet.size
    k = fbar.depth
    if n < k - 1:
        raise InvalidArgument("n must be at least depth - 1")
    long = mu.cylinder_weights(n + 1).reshape(m, m**n)
    short = mu.cylinder_weights(n)
    ef = np.exp(fbar.flat).reshape(m, m ** (k - 1))
    # fbar(a0 w) depends on a0 and the first k-1 symbols of w
    ef_full = np.repeat(ef, m ** (n - k + 1), axis=1)
    pred = mu.alphabet.weights[:, None] * ef_full * short[None, :]
    return float(np.max(np.abs(long - pred)))


def _forward_transitions(mu: MarkovMeasure) -> np.ndarray:
    m = mu.alphabet.size
    r = mu.order
    head = mu.block.sum(axis=-1).reshape(-1)
    blk = mu.block.reshape(m**r, m)
    with np.errstate(divide="ignore", invalid="ignore"):
        P = np.where(head[:, None] > 0, blk / np.where(head > 0, head, 1.0)[:, None], 1.0 / m)
    return P


def sample_path(mu: MarkovMeasure, n: int, seed: int) -> np.ndarray:
    """A word of length ``n`` drawn from the cylinder weights of ``mu``."""
    if n < 0:
        raise InvalidArgument("path length must be >= 0")
    rng = np.random.default_rng(seed)
    m = mu.alphabet.size
    r = mu.order
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    start_len = min(n, r)
    start = rng.choice(m**start_len, p=mu.cylinder_weights(start_len) / mu.cylinder_weights(start_len).sum())
    out = np.empty(n, dtype=np.int64)
    for i in range(start_len - 1, -1, -1):
        out[i] = start % m
        start //= m
    if n == start_len:
        return out
    cdf = np.cumsum(_forward_transitions(mu), axis=1)
    cdf[:, -1] = 1.0
    u = rng.random(n - r)
    state = 0
    for i in range(r):
        state = state * m + int(out[i])
    mod = m ** (r - 1)
    for i in range(r, n):
        b = int(np.searchsorted(cdf[state], u[i - r], side="right"))
        out[i] = b
        state = (state % mod) * m + b
    return out


def from_transitions(alphabet: Alphabet, P: np.ndarray, order: int = 1) -> MarkovMeasure:
    """Stationary measure of the order-r chain with row-stochastic ``P[u, b]`` (u of length r)."""
    m = alphabet.size
    P = np.asarray(P, dtype=float)
    if P.shape != (m**order, m):
        raise InvalidArgument(f"transition matrix must have shape {(m ** order, m)}")
    S = np.zeros((m**order, m**order))
    mod = m ** (order - 1)
    for u in range(m**order):
        for b in range(m):
            S[u, (u % mod) * m + b] += P[u, b]
    pi = _stationary(S)
    blk = pi[:, None] * P
    blk = blk / blk.sum()
    block = blk.reshape((m,) * (order + 1))
    return MarkovMeasure(alphabet, block)


def random_markov(alphabet: Alphabet, seed: int, order: int = 1, concentration: float = 1.0) -> MarkovMeasure:
    """Random shift-invariant Markov measure with strictly positive cylinder weights."""
    m = alphabet.size
    check_budget(m, order + 1)
    rng = np.random.default_rng(seed)
    P = rng.dirichlet(np.full(m, concentration), size=m**order)
    P = np.maximum(P, 1e-6)
    P = P / P.sum(axis=1, keepdims=True)
    return from_transitions(alphabet, P, order)


def perturb(mu: MarkovMeasure, eps: float, direction: np.ndarray) -> MarkovMeasure:
    """Tilt the forward transitions of ``mu`` by ``exp(eps * direction)`` and re-solve stationarity."""
    P = _forward_transitions(mu) * np.exp(eps * np.asarray(direction, dtype=float))
    P = P / P.sum(axis=1, keepdims=True)
    return from_transitions(mu.alphabet, P, mu.order)


def pair_distance(mu: MarkovMeasure, nu: MarkovMeasure) -> float:
    """Largest difference of cylinder weights at the longer of the two block lengths."""
    n = max(mu.order, nu.order) + 1
    return float(np.max(np.abs(mu.cylinder_weights(n) - nu.cylinder_weights(n))))


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.sum(np.abs(np.asarray(p) - np.asarray(q))))


def dirac_constant(alphabet: Alphabet, symbol: int = 0) -> MarkovMeasure:
    """Point mass on the constant sequence ``symbol symbol ...``."""
    m = alphabet.size
    pair = np.zeros((m, m))
    pair[symbol, symbol] = 1.0
    return MarkovMeasure(alphabet, pair)
