"""JSON run configuration for the command-line front end."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import alphabet as alph
from . import potential as pot
from .alphabet import Alphabet
from .errors import RuelleLabError
from .measures import MarkovMeasure, product_measure, random_markov
from .potential import Potential


class ConfigError(RuelleLabError):
    pass


def _positive(value, name: str) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    if not v > 0 or not math.isfinite(v):
        raise ConfigError(f"{name} must be positive, got {value!r}")
    return v


def _int(value, name: str, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(f"{name} must be >= {minimum}, got {value!r}")
    return int(value)


def build_alphabet(spec: dict) -> Alphabet:
    if not isinstance(spec, dict):
        raise ConfigError("alphabet must be an object")
    kind = spec.get("kind", "finite")
    try:
        if kind == "finite":
            if "weights" in spec:
                return alph.finite(spec["weights"])
            return alph.uniform_finite(_int(spec.get("size", 2), "alphabet.size", 1))
        if kind in ("interval", "discretized"):
            return alph.discretize_interval(
                float(spec.get("lo", -1.0)), float(spec.get("hi", 1.0)),
                spec.get("density", "uniform"), _int(spec.get("nodes", 64), "alphabet.nodes", 1),
                spec.get("rule", "gauss"), spec.get("metric", "absolute"))
    except ConfigError:
        raise
    except (RuelleLabError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad alphabet: {exc}")
    raise ConfigError(f"unknown alphabet kind {kind!r}")


_POTENTIAL_KEYS = {
    "constant": {"c", "depth"},
    "ising": {"beta"},
    "random": {"seed", "depth", "amplitude"},
    "tensor": {"depth", "values"},
    "user-tensor": {"depth", "values"},
    "file": {"path"},
}


def build_potential(spec: dict, alphabet: Alphabet, base_dir: Path | None = None) -> Potential:
    if not isinstance(spec, dict):
        raise ConfigError("potential must be an object")
    family = spec.get("family")
    allowed = _POTENTIAL_KEYS.get(family)
    if allowed is not None:
        unknown = sorted(set(spec) - allowed - {"family"})
        if unknown:
            raise ConfigError(f"unknown keys for potential family {family!r}: {', '.join(unknown)}")
    try:
        if family == "constant":
            return pot.constant(alphabet, float(spec.get("c", 0.0)), depth=_int(spec.get("depth", 2), "depth", 1))
        if family == "ising":
            return pot.ising(alphabet, float(spec.get("beta", 1.0)))
        if family == "random":
            return pot.random_potential(alphabet, _int(spec.get("seed", 0), "potential.seed"),
                                        depth=_int(spec.get("depth", 2), "depth", 1),
                                        amplitude=float(spec.get("amplitude", 1.0)))
        if family in ("tensor", "user-tensor"):
            depth = _int(spec.get("depth", 2), "depth", 1)
            values = np.asarray(spec["values"], dtype=float)
            if values.size != alphabet.size**depth:
                raise ConfigError(f"tensor needs {alphabet.size ** depth} values, got {values.size}")
            return pot.from_tensor(alphabet, values, depth)
        if family == "file":
            path = Path(spec["path"])
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            if not path.exists():
                raise ConfigError(f"potential file {path} does not exist")
            return Potential.from_dict(json.loads(path.read_text()), alphabet)
    except ConfigError:
        raise
    except KeyError as exc:
        raise ConfigError(f"potential spec missing field {exc}")
    except (RuelleLabError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad potential: {exc}")
    raise ConfigError(f"unknown potential family {family!r}")


@dataclass
class RunConfig:
    raw: dict
    alphabet: Alphabet
    potential: Potential
    out_dir: Path
    seed: int = 0
    jobs: int = 1
    tol: float = 1e-13
    max_iter: int = 100_000
    n_max: int = 10
    figures: bool = True
    base_dir: Path | None = field(default=None, repr=False)

    def section(self, name: str) -> dict:
        sec = self.raw.get(name, {})
        if not isinstance(sec, dict):
            raise ConfigError(f"section {name!r} must be an object")
        return sec

    def measure(self, spec: Any, gibbs: MarkovMeasure | None = None) -> MarkovMeasure:
        """Measure selected by ``{"kind": "gibbs" | "product" | "random", ...}``."""
        if spec is None:
            spec = {"kind": "gibbs"}
        if isinstance(spec, str):
            spec = {"kind": spec}
        kind = spec.get("kind")
        if kind == "gibbs":
            if gibbs is None:
                from .variational import equilibrium_state
                gibbs = equilibrium_state(self.potential)
            return gibbs
        if kind == "product":
            return product_measure(self.alphabet)
        if kind == "random":
            return random_markov(self.alphabet, _int(spec.get("seed", self.seed), "measure.seed"),
                                 order=_int(spec.get("order", 1), "measure.order", 1))
        raise ConfigError(f"unknown measure kind {kind!r}")


def load_config(path: str | Path | None, out_dir: str | None = None, seed: int | None = None,
                jobs: int | None = None, data: dict | None = None) -> RunConfig:
    base_dir = None
    if data is None:
        if path is None:
            raise ConfigError("--config is required")
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file {p} does not exist")
        try:
            data = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}")
        base_dir = p.parent
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    if "alphabet" not in data or "potential" not in data:
        raise ConfigError("config needs 'alphabet' and 'potential' sections")
    A = build_alphabet(data["alphabet"])
    f = build_potential(data["potential"], A, base_dir)
    out = Path(out_dir or data.get("out", "ruelle_out"))
    cfg = RunConfig(
        raw=data,
        alphabet=A,
        potential=f,
        out_dir=out,
        seed=_int(seed if seed is not None else data.get("seed", 0), "seed"),
        jobs=_int(jobs if jobs is not None else data.get("jobs", 1), "jobs", 1),
        tol=_positive(data.get("tol", 1e-13), "tol"),
        max_iter=_int(data.get("max_iter", 100_000), "max_iter", 1),
        n_max=_int(data.get("n_max", 10), "n_max", 2),
        figures=bool(data.get("figures", True)),
        base_dir=base_dir,
    )
    return cfg
