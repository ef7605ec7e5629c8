"""Words, eventually periodic sequences, the shift and the product metric.

Sequences are indexed from 0 in Python, so ``seq[i]`` is coordinate i+1
of the point in the one-sided shift space.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence as Seq

import numpy as np

from .alphabet import Alphabet
from .errors import InvalidArgument, check_budget

Word = tuple


@dataclass(frozen=True)
class Sequence:
    """Eventually periodic sequence: ``prefix`` followed by ``period`` repeated."""

    prefix: tuple = ()
    period: tuple = (0,)

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(int(s) for s in self.prefix))
        object.__setattr__(self, "period", tuple(int(s) for s in self.period))
        if not self.period:
            raise InvalidArgument("period word must be nonempty")
        if any(s < 0 for s in self.prefix + self.period):
            raise InvalidArgument("symbols must be nonnegative indices")

    def __getitem__(self, i: int) -> int:
        if i < 0:
            raise IndexError("sequence coordinates start at 0")
        if i < len(self.prefix):
            return self.prefix[i]
        return self.period[(i - len(self.prefix)) % len(self.period)]

    def take(self, n: int, start: int = 0) -> tuple:
        return tuple(self[i] for i in range(start, start + n))

    def max_symbol(self) -> int:
        return max(self.prefix + self.period)

    def __str__(self) -> str:
        head = ",".join(map(str, self.prefix))
        return f"{head}({','.join(map(str, self.period))})^inf"


# the boundary point y of the finite-volume kernels is just a sequence
BoundaryCondition = Sequence


def constant(symbol: int) -> Sequence:
    return Sequence((), (symbol,))


def periodic(word: Seq[int]) -> Sequence:
    return Sequence((), tuple(word))


def shift(x: Sequence, n: int = 1) -> Sequence:
    """Left shift applied ``n`` times."""
    if n < 0:
        raise InvalidArgument("shift count must be >= 0")
    if n <= len(x.prefix):
        return Sequence(x.prefix[n:], x.period)
    k = (n - len(x.prefix)) % len(x.period)
    return Sequence((), x.period[k:] + x.period[:k])


def concat(x: Seq[int], y: Sequence) -> Sequence:
    """The point equal to ``x`` on the first len(x) sites and to ``y`` after."""
    x = tuple(int(s) for s in x)
    tail = shift(y, len(x))
    return Sequence(x + tail.prefix, tail.period)


def product_metric(x: Sequence, y: Sequence, alphabet: Alphabet, truncation: int = 60):
    """Truncated product distance ``sum_n 2^-n d(x_n, y_n) / (1 + d(x_n, y_n))``.

    Returns ``(value, tail_bound)`` where ``tail_bound = 2**-truncation``
    bounds the omitted terms.
    """
    if truncation < 1:
        raise InvalidArgument("truncation must be >= 1")
    total = 0.0
    for i in range(truncation):
        d = alphabet.distance(x[i], y[i])
        total += 2.0 ** (-(i + 1)) * d / (1.0 + d)
    return total, 2.0 ** (-truncation)


def enumerate_words(alphabet: Alphabet | int, n: int) -> Iterator[Word]:
    """All words of length ``n`` in lexicographic order."""
    m = alphabet if isinstance(alphabet, (int, np.integer)) else alphabet.size
    if n < 0:
        raise InvalidArgument("word length must be >= 0")
    check_budget(m, n)
    return itertools.product(range(m), repeat=n)


def word_array(m: int, n: int) -> np.ndarray:
    """All words of length ``n`` as rows of an (m**n, n) integer array, lexicographic."""
    count = check_budget(m, n)
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    idx = np.arange(count, dtype=np.int64)
    powers = m ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % m


def word_index(word: Seq[int], m: int) -> int:
    """Lexicographic rank of ``word`` among words of the same length."""
    out = 0
    for s in word:
        out = out * m + int(s)
    return out


def format_word(word: Seq[int]) -> str:
    return ",".join(str(int(s)) for s in word)


def parse_word(text: str) -> Word:
    text = text.strip()
    if not text:
        return ()
    return tuple(int(s) for s in text.split(","))


def sequence_from_dict(data) -> Sequence:
    """Accept ``{"prefix": [...], "period": [...]}``, ``{"constant": a}`` or a list (periodic)."""
    if isinstance(data, Sequence):
        return data
    if isinstance(data, (list, tuple)):
        return periodic(data)
    if isinstance(data, dict):
        if "constant" in data:
            return constant(int(data["constant"]))
        return Sequence(tuple(data.get("prefix", ())), tuple(data.get("period", (0,))))
    raise InvalidArgument(f"cannot build a sequence from {data!r}")
