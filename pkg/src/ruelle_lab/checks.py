"""Verification suites behind ``ruelle-lab verify``.

Each suite returns a list of verdicts ``{check, residual, tolerance, pass}``
(plus context fields). A verdict with ``comparison == "ge"`` passes when the
residual is at least the tolerance; these are negative controls.
"""

from __future__ import annotations

import math

import numpy as np

from . import dlr, entropy as ent, measures as ms, potential as pot, variational as var
from .measures import product_measure, random_markov
from .potential import Potential
from .symbolic import constant, periodic, Sequence
from .transfer import normalization_residual, normalize, solve

SUITES = ("theorem1", "dlr", "equivalence", "walters", "corollary")


def verdict(check: str, residual: float, tolerance: float, comparison: str = "le", **extra) -> dict:
    if comparison == "le":
        ok = residual <= tolerance
    else:
        ok = residual >= tolerance
    out = {"check": check, "residual": float(residual), "tolerance": float(tolerance),
           "comparison": comparison, "pass": bool(ok)}
    out.update(extra)
    return out


def _boundaries(m: int) -> list[Sequence]:
    bs = [constant(0), constant(m - 1), periodic(range(m))]
    if m > 1:
        bs.append(Sequence((m - 1,), (0, 1)))
    return bs


def _test_measures(f: Potential, seed: int, count: int = 3) -> list:
    order = max(f.depth - 1, 1)
    out = [("product", product_measure(f.alphabet))]
    out += [(f"random[{seed + i}]", random_markov(f.alphabet, seed + i, order=order)) for i in range(count)]
    return out


def _volume_limit(f: Potential, n_max: int) -> int:
    # keep exact enumerations at desk scale
    m = f.alphabet.size
    n = n_max
    while n > 2 and m ** (n + max(f.depth - 1, 1)) > 2**20:
        n -= 1
    return n


def theorem1(f: Potential, n_max: int = 10, seed: int = 0) -> list:
    S = solve(f)
    fbar = normalize(f, S)
    n_top = _volume_limit(f, n_max)
    worst = 0.0
    for _, mu in _test_measures(f, seed):
        for y in _boundaries(f.alphabet.size):
            for n in range(1, n_top + 1):
                worst = max(worst, ent.kernel_entropy_identity(mu, fbar, y, n)["residual"])
    out = [verdict("theorem1.kernel_identity", worst, 1e-12, n_max=n_top)]

    mu_f = ms.gibbs_from_normalized(fbar)
    rate_err = 0.0
    second = 0.0
    for _, mu in _test_measures(f, seed + 100):
        rep = ent.relative_entropy_rate_empirical(mu, mu_f, n_top)
        formula = ent.relative_entropy_rate(mu, f, S)
        rate_err = max(rate_err, abs(rep.extrapolated_limit - formula))
        r = max(getattr(mu, "order", 1), mu_f.order)
        d2 = ent.second_differences(rep.H_n[r - 1:])
        second = max(second, float(np.max(np.abs(d2))) if d2.size else 0.0)
    out.append(verdict("theorem1.rate_formula", rate_err, 1e-8, n_max=n_top))
    out.append(verdict("theorem1.affine_second_differences", second, 1e-12, n_max=n_top))
    return out


def dlr_suite(f: Potential, n_max: int = 6, seed: int = 0) -> list:
    S = solve(f)
    fbar = normalize(f, S)
    mu_f = ms.gibbs_from_normalized(fbar)
    n_top = min(6, _volume_limit(f, n_max))
    worst = max(dlr.dlr_check(mu_f, fbar, n) for n in range(1, n_top + 1))
    out = [verdict("dlr.gibbs_invariance", worst, 1e-12, n_max=n_top)]
    prod = product_measure(f.alphabet)
    control = dlr.dlr_check(prod, fbar, 2)
    if ms.pair_distance(prod, mu_f) <= 1e-8:
        # the product measure is itself the Gibbs measure; nothing to detect
        out.append(verdict("dlr.product_control", control, 1e-12, expected_negative=False,
                           note="product measure coincides with the Gibbs measure"))
    else:
        out.append(verdict("dlr.product_control", control, 1e-12, comparison="ge", expected_negative=True))
    out.append(verdict("dlr.properness", normalization_residual(fbar), 1e-10))
    return out


def equivalence(f: Potential, seed: int = 0, trials: int = 3) -> list:
    S = solve(f)
    mu_f = var.equilibrium_state(f, S)
    K = max(f.depth, 2)
    cfg = var.OptimizationConfig(family_depth=K, seed=seed, restarts=2)
    gaps, grads = [], []
    measures = [mu_f] + [random_markov(f.alphabet, seed + i, order=K - 1) for i in range(trials)]
    for i, mu in enumerate(measures):
        rep = var.entropy_variational(mu, cfg)
        gaps.append(rep.gap)
        g = pot.random_potential(f.alphabet, seed + 1000 + i, depth=K, amplitude=0.5)
        grads.append(var.gradient_check(mu, g))
    return [
        verdict("equivalence.hv_equals_hs", max(gaps), 1e-4, measures=len(measures)),
        verdict("equivalence.gradient_check", max(grads), 1e-6),
    ]


def walters(f: Potential, n_max: int = 8) -> list:
    k = f.depth
    out = []
    for j in range(max(k - 1, 0), k + 1):
        out.append(verdict(f"walters.modulus_j{j}", pot.walters_modulus(f, n_max, j), 0.0, j=j))
    if k > 1:
        out.append({"check": "walters.modulus_j0", "residual": pot.walters_modulus(f, n_max, 0),
                    "tolerance": None, "comparison": "info", "pass": True})
    return out


def corollary(f: Potential, trials: int = 100, seed: int = 0, eps: float = 0.05) -> list:
    chk = var.pressure_variational_check(f, trials, seed)
    probe = var.uniqueness_probe(f, min(trials, 100), eps, seed)
    return [
        verdict("corollary.variational_upper_bound", chk["max_excess"], 1e-12, trials=trials),
        verdict("corollary.equilibrium_attains", chk["equilibrium_residual"], 1e-10),
        verdict("corollary.deficit_nonnegative", -chk["min_deficit"], 1e-12),
        verdict("corollary.uniqueness_violations", probe["violations"], 0,
                min_rate=probe["min_rate"], order_mean=probe["order_mean"]),
    ]


def run_suite(name: str, f: Potential, params: dict) -> list:
    seed = int(params.get("seed", 0))
    n_max = int(params.get("n_max", 10))
    if name == "theorem1":
        return theorem1(f, n_max, seed)
    if name == "dlr":
        return dlr_suite(f, n_max, seed)
    if name == "equivalence":
        return equivalence(f, seed, int(params.get("variational_trials", 3)))
    if name == "walters":
        return walters(f, int(params.get("walters_n_max", 8)))
    if name == "corollary":
        return corollary(f, int(params.get("trials", 100)), seed, float(params.get("eps", 0.05)))
    raise ValueError(f"unknown suite {name!r}")


def all_pass(verdicts: list) -> bool:
    return all(v["pass"] for v in verdicts) and not any(
        isinstance(v["residual"], float) and math.isnan(v["residual"]) for v in verdicts)
