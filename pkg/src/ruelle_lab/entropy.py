"""Finite-volume relative entropies, specific entropy and relative entropy rates.

Conventions: ``0 log 0 = 0``; a relative entropy is ``+inf`` exactly when
absolute continuity fails on the cylinder algebra, which is detected by an
explicit support check (never by overflow) and recorded in the ``infinite``
flag of an :class:`EntropyReport`.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .alphabet import Alphabet
from .dlr import gamma
from .errors import InvalidArgument
from .measures import MarkovMeasure, integrate_local, product_measure
from .potential import Potential, birkhoff_sums
from .symbolic import Sequence, word_array
from .transfer import SpectralData


@dataclass
class EntropyReport:
    n_values: list
    H_n: list
    rates: list
    identity_residuals: list
    extrapolated_limit: float
    closed_form: float | None = None
    infinite: bool = False
    label: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def affine_residual(self) -> float:
        return max(self.identity_residuals) if self.identity_residuals else 0.0

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "n": list(self.n_values),
            "H_n": list(self.H_n),
            "rate": list(self.rates),
            "residual": list(self.identity_residuals),
            "extrapolated_limit": self.extrapolated_limit,
            "closed_form": self.closed_form,
            "infinite": self.infinite,
            **self.extra,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "H_n", "rate", "residual"])
        for row in zip(self.n_values, self.H_n, self.rates, self.identity_residuals):
            w.writerow([row[0]] + [format(float(v) + 0.0, ".17g") for v in row[1:]])
        return buf.getvalue()


def _kl(a: np.ndarray, b: np.ndarray) -> float:
    mask = a > 0
    if np.any(b[mask] <= 0):
        return math.inf
    return float(np.sum(a[mask] * (np.log(a[mask]) - np.log(b[mask]))))


def relative_entropy_volume(mu, nu, n: int) -> float:
    """``sum_w mu[w] log(mu[w] / nu[w])`` over cylinders of length n (``inf`` if mu is not << nu)."""
    if n < 0:
        raise InvalidArgument("n must be >= 0")
    return _kl(mu.cylinder_weights(n), nu.cylinder_weights(n))


def volume_entropy(mu, alphabet: Alphabet, n: int) -> float:
    """Minus the relative entropy of ``mu`` with respect to the product of the a priori measure."""
    return 0.0 - relative_entropy_volume(mu, product_measure(alphabet), n)


def _order(mu) -> int:
    return getattr(mu, "order", 1)


def _affine_report(values: list, r: int, label: str) -> EntropyReport:
    n_max = len(values)
    ns = list(range(1, n_max + 1))
    infinite = any(math.isinf(v) for v in values)
    rates = [v / n for v, n in zip(values, ns)]
    if infinite:
        limit = math.copysign(math.inf, values[-1]) if math.isinf(values[-1]) else values[-1]
        return EntropyReport(ns, values, rates, [0.0] * n_max, limit, infinite=True, label=label)
    if n_max < 2:
        return EntropyReport(ns, values, rates, [0.0], values[0], label=label)
    limit = values[-1] - values[-2]
    residuals = [abs(values[i] - values[i - 1] - limit) if ns[i] >= r + 1 else 0.0
                 for i in range(1, n_max)]
    return EntropyReport(ns, values, rates, [0.0] + residuals, limit, label=label)


def specific_entropy_limit(mu, alphabet: Alphabet, n_max: int) -> EntropyReport:
    """Finite-volume entropies for n = 1..n_max and the increment extrapolation.

    For Markov measures the sequence is affine in n past the order, so the
    last increment is the exact specific entropy; ``identity_residuals``
    measures departures from that affine law.
    """
    if n_max < 1:
        raise InvalidArgument("n_max must be >= 1")
    prod = product_measure(alphabet)
    values = [0.0 - _kl(mu.cylinder_weights(n), prod.cylinder_weights(n)) for n in range(1, n_max + 1)]
    rep = _affine_report(values, _order(mu), "specific_entropy")
    if isinstance(mu, MarkovMeasure):
        rep.closed_form = specific_entropy_markov(mu, alphabet)
    return rep


def specific_entropy_markov(mu: MarkovMeasure, alphabet: Alphabet | None = None) -> float:
    """Closed form ``-sum mu[a u] log(mu[a u] / (p_a mu[u]))`` over blocks of length order+1."""
    alphabet = alphabet or mu.alphabet
    m = alphabet.size
    r = mu.order
    blk = mu.block.reshape(m, m**r)
    tail = mu.block.sum(axis=0).reshape(-1)
    denom = alphabet.weights[:, None] * tail[None, :]
    mask = blk > 0
    return float(-np.sum(blk[mask] * (np.log(blk[mask]) - np.log(denom[mask]))))


def kolmogorov_sinai_markov(mu: MarkovMeasure) -> float:
    """Entropy rate ``-sum pi(u) P(u, b) log P(u, b)`` of the forward chain."""
    m = mu.alphabet.size
    blk = mu.block.reshape(m**mu.order, m)
    head = blk.sum(axis=1)
    mask = blk > 0
    P = np.where(mask, blk / np.where(head > 0, head, 1.0)[:, None], 1.0)
    return float(-np.sum(blk[mask] * np.log(P[mask])))


def relative_entropy_rate(mu: MarkovMeasure, f: Potential, S: SpectralData) -> float:
    """``log lambda_f - int f dmu - h^s(mu)``, the rate against the Gibbs measure of f."""
    hs = specific_entropy_markov(mu)
    if math.isinf(hs):
        return math.inf
    return S.log_lambda - integrate_local(mu, f) - hs


def relative_entropy_rate_empirical(mu, nu, n_max: int) -> EntropyReport:
    """``H_n(mu | nu)`` for n = 1..n_max with the increment extrapolation."""
    if n_max < 1:
        raise InvalidArgument("n_max must be >= 1")
    values = [relative_entropy_volume(mu, nu, n) for n in range(1, n_max + 1)]
    return _affine_report(values, max(_order(mu), _order(nu)), "relative_entropy_rate")


def second_differences(values) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    return v[2:] - 2 * v[1:-1] + v[:-2]


def kernel_entropy_identity(mu, fbar: Potential, y: Sequence, n: int) -> dict:
    """Both sides of ``H_n(mu | gamma_n(.|y)) = -H_n(mu) - int S_n fbar(x y) dmu(x)``.

    The left side enumerates the kernel weights, the right side uses the
    volume entropy and the exact Birkhoff integral with boundary ``y``.
    """
    m = fbar.alphabet.size
    a = mu.cylinder_weights(n)
    lhs = _kl(a, gamma(fbar, n, y))
    Hn = volume_entropy(mu, fbar.alphabet, n)
    sums = birkhoff_sums(fbar, word_array(m, n), y.take(fbar.depth - 1, start=n))
    rhs = -Hn - float(np.dot(a, sums))
    residual = abs(lhs - rhs) if math.isfinite(lhs) and math.isfinite(rhs) else (0.0 if lhs == rhs else math.inf)
    return {"n": n, "lhs": lhs, "rhs": rhs, "residual": residual}


def kernel_entropy_rates(mu, fbar: Potential, y: Sequence, n_max: int) -> EntropyReport:
    """``H_n(mu | gamma_n(.|y)) / n`` for n = 1..n_max; residuals are those of the identity."""
    rows = [kernel_entropy_identity(mu, fbar, y, n) for n in range(1, n_max + 1)]
    values = [r["lhs"] for r in rows]
    ns = list(range(1, n_max + 1))
    return EntropyReport(ns, values, [v / n for v, n in zip(values, ns)],
                         [r["residual"] for r in rows], values[-1] - values[-2] if n_max > 1 else values[0],
                         label="kernel_relative_entropy")
