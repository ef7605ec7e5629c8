"""Alphabets with an a priori probability measure.

A finite alphabet carries explicit symbol weights. A compact interval is
replaced by a quadrature rule whose weights (times the density) play the
role of the a priori measure, which turns the Ruelle operator into a finite
matrix.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .errors import DegenerateMeasure, InvalidArgument

WEIGHT_TOL = 1e-12
METRICS = ("discrete", "absolute", "circle")


def _named_density(spec: Any) -> Callable[[np.ndarray], np.ndarray]:
    if callable(spec):
        return spec
    if isinstance(spec, str):
        spec = {"name": spec}
    if not isinstance(spec, dict) or "name" not in spec:
        raise InvalidArgument(f"unknown density descriptor {spec!r}")
    name = spec["name"]
    if name in ("uniform", "constant", "lebesgue"):
        return lambda x: np.ones_like(x)
    if name == "gaussian":
        mean = float(spec.get("mean", 0.0))
        sigma = float(spec.get("sigma", 1.0))
        if sigma <= 0:
            raise InvalidArgument("gaussian density needs sigma > 0")
        return lambda x: np.exp(-0.5 * ((x - mean) / sigma) ** 2)
    if name == "power":
        # x**exponent, useful for skewed weights on [0, hi]
        exponent = float(spec.get("exponent", 1.0))
        return lambda x: np.abs(x) ** exponent
    raise InvalidArgument(f"unknown density {name!r}")


@dataclass(frozen=True)
class Alphabet:
    """Symbol set with strictly positive a priori weights summing to one.

    ``points`` holds symbol coordinates (indices for finite alphabets, node
    positions for discretized intervals). ``metric`` names the base metric
    used by :func:`ruelle_lab.symbolic.product_metric`.
    """

    kind: str
    points: np.ndarray
    weights: np.ndarray
    metric: str = "discrete"
    period: float | None = field(default=None)

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)
        points.setflags(write=False)
        weights.setflags(write=False)
        if self.kind not in ("finite", "discretized"):
            raise InvalidArgument(f"alphabet kind must be finite or discretized, got {self.kind!r}")
        if self.metric not in METRICS:
            raise InvalidArgument(f"unknown metric {self.metric!r}")
        if points.ndim != 1 or points.shape != weights.shape or points.size == 0:
            raise InvalidArgument("points and weights must be nonempty 1-d arrays of equal length")
        if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
            raise DegenerateMeasure("a priori weights must be strictly positive (full support)")
        if abs(weights.sum() - 1.0) > WEIGHT_TOL:
            raise InvalidArgument(f"weights sum to {weights.sum()!r}, expected 1")
        if np.unique(points).size != points.size:
            raise InvalidArgument("alphabet points must be pairwise distinct")

    @property
    def size(self) -> int:
        return int(self.points.size)

    def __len__(self) -> int:
        return self.size

    def distance(self, i: int, j: int) -> float:
        """Base metric between symbols ``i`` and ``j``."""
        if self.metric == "discrete":
            return 0.0 if i == j else 1.0
        d = abs(self.points[i] - self.points[j])
        if self.metric == "circle":
            L = self.period if self.period is not None else 1.0
            d = d % L
            d = min(d, L - d)
        return float(d)

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "points": self.points.tolist(),
            "weights": self.weights.tolist(),
            "metric": self.metric,
        }
        if self.period is not None:
            out["period"] = self.period
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "Alphabet":
        return cls(
            kind=data["kind"],
            points=np.asarray(data["points"], dtype=float),
            weights=np.asarray(data["weights"], dtype=float),
            metric=data.get("metric", "discrete"),
            period=data.get("period"),
        )

    @classmethod
    def from_json(cls, text: str) -> "Alphabet":
        return cls.from_dict(json.loads(text))


def uniform_finite(m: int) -> Alphabet:
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise InvalidArgument(f"alphabet size must be a positive integer, got {m!r}")
    return Alphabet("finite", np.arange(m, dtype=float), np.full(m, 1.0 / m))


def finite(weights: Sequence[float]) -> Alphabet:
    """Finite alphabet with the given (renormalized) a priori weights."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise InvalidArgument("weights must be a nonempty vector")
    if np.any(w <= 0) or not np.all(np.isfinite(w)):
        raise DegenerateMeasure("a priori weights must be strictly positive (full support)")
    return Alphabet("finite", np.arange(w.size, dtype=float), w / w.sum())


def discretize_interval(lo: float, hi: float, density: Any = "uniform", n_nodes: int = 64,
                        rule: str = "gauss", metric: str = "absolute") -> Alphabet:
    """Quadrature discretization of a density on ``[lo, hi]``.

    ``density`` is a callable on arrays or a descriptor (``"uniform"``,
    ``{"name": "gaussian", "sigma": ...}``). The returned weights are the
    quadrature weights times the density, renormalized to sum to one.
    """
    if not lo < hi:
        raise InvalidArgument(f"need lo < hi, got [{lo}, {hi}]")
    if n_nodes < 1:
        raise InvalidArgument("n_nodes must be >= 1")
    if rule == "gauss":
        x, w = np.polynomial.legendre.leggauss(n_nodes)
    elif rule == "midpoint":
        x = -1.0 + (2.0 * np.arange(n_nodes) + 1.0) / n_nodes
        w = np.full(n_nodes, 2.0 / n_nodes)
    else:
        raise InvalidArgument(f"unknown quadrature rule {rule!r}")
    half = 0.5 * (hi - lo)
    nodes = lo + half * (x + 1.0)
    qw = half * w
    dens = np.asarray(_named_density(density)(nodes), dtype=float)
    if dens.shape != nodes.shape or not np.all(np.isfinite(dens)) or np.any(dens < 0):
        raise InvalidArgument("density must be finite and nonnegative at the nodes")
    mass = qw * dens
    total = mass.sum()
    if not total > 1e-300 or np.any(mass <= 0):
        raise DegenerateMeasure("density vanishes at some quadrature node or integrates to ~0")
    period = (hi - lo) if metric == "circle" else None
    return Alphabet("discretized", nodes, mass / total, metric=metric, period=period)


def integrate(alphabet: Alphabet, f: Callable[[np.ndarray], Any] | Sequence[float]) -> float:
    """Integral of ``f`` against the a priori measure.

    ``f`` may be a callable evaluated on the symbol points or a vector of
    values indexed by symbol.
    """
    if callable(f):
        values = np.asarray(f(alphabet.points), dtype=float)
        if values.ndim == 0:
            values = np.full(alphabet.size, float(values))
    else:
        values = np.asarray(f, dtype=float)
    if values.shape != (alphabet.size,):
        raise InvalidArgument("integrand must give one value per symbol")
    return float(np.dot(alphabet.weights, values))


def spins(alphabet: Alphabet) -> np.ndarray:
    """Spin values used by the Ising family.

    Finite alphabets get evenly spaced spins in [1, -1] (so two symbols are
    +1, -1); discretized alphabets use the node coordinates.
    """
    if alphabet.kind == "discretized":
        return alphabet.points.copy()
    m = alphabet.size
    if m == 1:
        return np.ones(1)
    return 1.0 - 2.0 * np.arange(m) / (m - 1)
