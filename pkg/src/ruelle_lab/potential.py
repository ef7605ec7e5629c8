"""Locally constant potentials of finite depth.

A depth-k potential is a function of the first k coordinates and is stored
as a dense tensor of shape ``(m,) * k`` indexed by words in lexicographic
order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .alphabet import Alphabet, spins
from .errors import InvalidArgument, check_budget
from .symbolic import Sequence, concat, constant as constant_sequence, word_array


@dataclass(frozen=True, eq=False)
class Potential:
    alphabet: Alphabet
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        m = self.alphabet.size
        if values.ndim < 1:
            raise InvalidArgument("potential depth must be >= 1")
        if values.shape != (m,) * values.ndim:
            raise InvalidArgument(f"tensor shape {values.shape} does not match alphabet size {m}")
        if not np.all(np.isfinite(values)):
            raise InvalidArgument("potential values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def depth(self) -> int:
        return self.values.ndim

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    def __call__(self, x: Sequence) -> float:
        return eval_potential(self, x)

    def lift(self, depth: int) -> "Potential":
        """Same function viewed as a potential of larger depth."""
        if depth < self.depth:
            raise InvalidArgument("cannot lower the depth of a potential")
        extra = depth - self.depth
        v = self.values.reshape(self.values.shape + (1,) * extra)
        return Potential(self.alphabet, np.broadcast_to(v, (self.alphabet.size,) * depth))

    def _coerce(self, other):
        if isinstance(other, Potential):
            if other.alphabet is not self.alphabet and other.alphabet.to_dict() != self.alphabet.to_dict():
                raise InvalidArgument("potentials live on different alphabets")
            k = max(self.depth, other.depth)
            return self.lift(k).values, other.lift(k).values
        return self.values, float(other)

    def __add__(self, other) -> "Potential":
        a, b = self._coerce(other)
        return Potential(self.alphabet, a + b)

    __radd__ = __add__

    def __sub__(self, other) -> "Potential":
        a, b = self._coerce(other)
        return Potential(self.alphabet, a - b)

    def __mul__(self, c: float) -> "Potential":
        return Potential(self.alphabet, self.values * float(c))

    __rmul__ = __mul__

    def __neg__(self) -> "Potential":
        return Potential(self.alphabet, -self.values)

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "alphabet_ref": self.alphabet.to_dict(),
            "values": self.flat.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict, alphabet: Alphabet | None = None) -> "Potential":
        if alphabet is None:
            alphabet = Alphabet.from_dict(data["alphabet_ref"])
        k = int(data["depth"])
        values = np.asarray(data["values"], dtype=float)
        if values.size != alphabet.size**k:
            raise InvalidArgument(f"expected {alphabet.size ** k} values for depth {k}, got {values.size}")
        return cls(alphabet, values.reshape((alphabet.size,) * k))


# -- families -------------------------------------------------------------

def constant(alphabet: Alphabet, c: float, depth: int = 1) -> Potential:
    return Potential(alphabet, np.full((alphabet.size,) * depth, float(c)))


def ising(alphabet: Alphabet, beta: float) -> Potential:
    """Nearest-neighbour coupling ``beta * s(x1) * s(x2)``."""
    s = spins(alphabet)
    return Potential(alphabet, beta * np.outer(s, s))


def random_potential(alphabet: Alphabet, seed: int, depth: int = 2, amplitude: float = 1.0) -> Potential:
    check_budget(alphabet.size, depth)
    rng = np.random.default_rng(seed)
    return Potential(alphabet, amplitude * rng.uniform(-1.0, 1.0, (alphabet.size,) * depth))


def from_tensor(alphabet: Alphabet, values, depth: int | None = None) -> Potential:
    v = np.asarray(values, dtype=float)
    if depth is not None:
        v = v.reshape((alphabet.size,) * depth)
    return Potential(alphabet, v)


# -- evaluation -----------------------------------------------------------

def eval_potential(f: Potential, x: Sequence) -> float:
    return float(f.values[tuple(x[i] for i in range(f.depth))])


def birkhoff_sum(f: Potential, n: int, x: Sequence) -> float:
    """``f(x) + f(sigma x) + ... + f(sigma^{n-1} x)``."""
    if n < 0:
        raise InvalidArgument("n must be >= 0")
    coords = [x[i] for i in range(n + f.depth - 1)]
    k = f.depth
    return float(sum(f.values[tuple(coords[j:j + k])] for j in range(n)))


def _flat_index(block: np.ndarray, m: int) -> np.ndarray:
    powers = m ** np.arange(block.shape[1] - 1, -1, -1, dtype=np.int64)
    return block @ powers


def birkhoff_sums(f: Potential, words: np.ndarray, tail) -> np.ndarray:
    """Vectorized ``S_n f(w y)`` for each row ``w`` of ``words`` and a fixed tail.

    ``tail`` gives the coordinates after the word; at least depth-1 of them
    are needed.
    """
    words = np.asarray(words, dtype=np.int64)
    n = words.shape[1]
    k = f.depth
    tail = np.asarray(tuple(tail)[: k - 1], dtype=np.int64)
    if tail.size < k - 1:
        raise InvalidArgument(f"need {k - 1} tail coordinates, got {tail.size}")
    ext = np.concatenate([words, np.broadcast_to(tail, (words.shape[0], k - 1))], axis=1)
    out = np.zeros(words.shape[0])
    flat = f.flat
    m = f.alphabet.size
    for j in range(n):
        out += flat[_flat_index(ext[:, j:j + k], m)]
    return out


# -- regularity diagnostics -----------------------------------------------

def variation(f: Potential, j: int) -> float:
    """Largest oscillation of ``f`` over words agreeing on their first ``j`` symbols."""
    if j < 0:
        raise InvalidArgument("j must be >= 0")
    k = f.depth
    if j >= k:
        return 0.0
    check_budget(f.alphabet.size, k)
    m = f.alphabet.size
    rows = f.flat.reshape(m**j, m ** (k - j))
    return float(np.max(rows.max(axis=1) - rows.min(axis=1)))


def walters_modulus(f: Potential, n_max: int, j: int) -> float:
    """Max over 1 <= n <= n_max, prefixes a in A^n and tails x, y agreeing on
    their first ``j`` coordinates of ``|S_n f(a x) - S_n f(a y)|``.

    Only the first depth-1 tail coordinates enter ``S_n f(a x)``, and for
    n >= depth-1 only the last depth-1 prefix symbols do, so the search is
    reduced to n <= min(n_max, depth-1) without loss.
    """
    if n_max < 1 or j < 0:
        raise InvalidArgument("need n_max >= 1 and j >= 0")
    k = f.depth
    r = k - 1
    if j >= r:
        return 0.0
    m = f.alphabet.size
    tails = word_array(m, r)
    best = 0.0
    for n in range(1, min(n_max, r) + 1):
        check_budget(m, n + 2 * r)
        prefixes = word_array(m, n)
        # sums[t, p] = S_n f(prefix_p tail_t)
        sums = np.stack([birkhoff_sums(f, prefixes, t) for t in tails])
        groups = sums.reshape(m**j, m ** (r - j), -1)
        spread = groups.max(axis=1) - groups.min(axis=1)
        best = max(best, float(spread.max()))
    return best


def depth_project(evaluator: Callable[[Sequence], float], alphabet: Alphabet, k: int,
                  y_star: Sequence | None = None) -> Potential:
    """Locally constant approximation ``f_k(x) = f(x_1 ... x_k y*)``."""
    if k < 1:
        raise InvalidArgument("depth must be >= 1")
    check_budget(alphabet.size, k)
    y_star = constant_sequence(0) if y_star is None else y_star
    words = word_array(alphabet.size, k)
    values = np.array([float(evaluator(concat(tuple(w), y_star))) for w in words])
    return Potential(alphabet, values.reshape((alphabet.size,) * k))
