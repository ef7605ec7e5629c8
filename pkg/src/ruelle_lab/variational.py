"""Pressure, the variational entropy and equilibrium states."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .alphabet import Alphabet
from .entropy import relative_entropy_rate, specific_entropy_markov
from .errors import InvalidArgument, NonConvergence
from .measures import (MarkovMeasure, _forward_transitions, gibbs_from_normalized, integrate_local,
                       pair_distance, perturb, random_markov)
from .potential import Potential
from .transfer import SpectralData, TransferMatrix, build, normalize, rpf_solve, solve
from .symbolic import word_array


@dataclass
class OptimizationConfig:
    family_depth: int = 2
    max_iter: int = 5000
    step_tol: float = 1e-15
    grad_tol: float = 1e-9
    seed: int = 0
    restarts: int = 5

    def __post_init__(self):
        if self.family_depth < 2:
            raise InvalidArgument("family_depth must be >= 2")
        if self.step_tol <= 0 or self.grad_tol <= 0:
            raise InvalidArgument("tolerances must be positive")
        if self.restarts < 1 or self.max_iter < 1:
            raise InvalidArgument("restarts and max_iter must be >= 1")


@dataclass
class VariationalReport:
    h_v: float
    minimizer: Potential
    h_s: float
    gap: float
    pressure_check: float
    iterations: int
    converged: bool = True
    starts: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "h_v": self.h_v,
            "h_s": self.h_s,
            "gap": self.gap,
            "pressure_check": self.pressure_check,
            "iterations": self.iterations,
            "converged": self.converged,
            "minimizer": self.minimizer.flat.tolist(),
        }


def pressure(f: Potential, alphabet: Alphabet | None = None) -> float:
    """``log lambda_f``."""
    return solve(f).log_lambda


def equilibrium_block(M: TransferMatrix, S: SpectralData) -> np.ndarray:
    """Cylinder weights of length depth(f) of ``h_f nu_f``, read off the spectral data.

    This is also the gradient of the pressure with respect to the tensor
    entries of the potential.
    """
    f = M.potential
    m = f.alphabet.size
    r = f.depth - 1
    A = M.entries
    # column index of the extension (a u) inside row u
    words = word_array(m, r)
    tail_idx = words[:, : r - 1] @ (m ** np.arange(r - 2, -1, -1, dtype=np.int64)) if r > 1 else np.zeros(m**r, dtype=np.int64)
    cols = np.arange(m)[:, None] * m ** (r - 1) + tail_idx[None, :]
    rows = np.arange(m**r)[None, :]
    blk = A[rows, cols] * S.h[cols] * S.nu[rows] / S.lam
    return blk / blk.sum()


def _objective(target: np.ndarray, g: Potential, warm=None):
    M = build(g)
    if warm is None:
        S = rpf_solve(M)
    else:
        S = rpf_solve(M, h0=warm.h, nu0=warm.nu)
    F = -float(np.dot(target, g.flat)) + S.log_lambda
    grad = -target + equilibrium_block(M, S).reshape(-1)
    return F, grad, S


def variational_objective(mu: MarkovMeasure, g: Potential) -> float:
    """``-int g dmu + log lambda_g``."""
    return -integrate_local(mu, g) + solve(g).log_lambda


def pressure_gradient(g: Potential) -> np.ndarray:
    M = build(g)
    return equilibrium_block(M, rpf_solve(M)).reshape(g.values.shape)


def gradient_check(mu: MarkovMeasure, g: Potential, step: float = 1e-5) -> float:
    """Relative sup-norm error of the analytic gradient of the objective against central differences."""
    target = mu.cylinder_weights(g.depth)
    _, grad, _ = _objective(target, g)
    fd = np.empty_like(grad)
    base = g.flat
    for i in range(base.size):
        e = np.zeros_like(base)
        e[i] = step
        fp = _objective(target, Potential(g.alphabet, (base + e).reshape(g.values.shape)))[0]
        fm = _objective(target, Potential(g.alphabet, (base - e).reshape(g.values.shape)))[0]
        fd[i] = (fp - fm) / (2 * step)
    return float(np.max(np.abs(fd - grad)) / max(np.max(np.abs(grad)), 1e-12))


def _descend(target: np.ndarray, g0: np.ndarray, alphabet: Alphabet, cfg: OptimizationConfig):
    shape = (alphabet.size,) * cfg.family_depth
    x = g0.copy()
    F, grad, S = _objective(target, Potential(alphabet, x.reshape(shape)))
    step = 1.0
    prev_x = prev_grad = None
    converged = False
    it = 0
    for it in range(1, cfg.max_iter + 1):
        if np.max(np.abs(grad)) <= cfg.grad_tol:
            converged = True
            break
        if prev_x is not None:
            s, yv = x - prev_x, grad - prev_grad
            sy = float(np.dot(s, yv))
            if sy > 0:
                step = float(np.dot(s, s)) / sy
        gg = float(np.dot(grad, grad))
        # Armijo backtracking
        while True:
            cand = x - step * grad
            try:
                Fc, gc, Sc = _objective(target, Potential(alphabet, cand.reshape(shape)), warm=S)
            except (NonConvergence, OverflowError):
                Fc = math.inf
            if Fc <= F - 1e-4 * step * gg:
                break
            step *= 0.5
            if step < 1e-20:
                break
        if not math.isfinite(Fc) or step < 1e-20:
            break
        prev_x, prev_grad = x, grad
        dF = F - Fc
        x, F, grad, S = cand, Fc, gc, Sc
        if dF <= cfg.step_tol * (1 + abs(F)) and np.max(np.abs(grad)) <= math.sqrt(cfg.grad_tol):
            converged = True
            break
    return F, x, it, converged


def entropy_variational(mu: MarkovMeasure, cfg: OptimizationConfig | None = None) -> VariationalReport:
    """Numerical infimum of ``-int g dmu + log lambda_g`` over depth-K potentials."""
    cfg = cfg or OptimizationConfig(family_depth=max(2, mu.order + 1))
    A = mu.alphabet
    K = cfg.family_depth
    target = mu.cylinder_weights(K)
    rng = np.random.default_rng(cfg.seed)
    best = None
    starts = []
    total_iter = 0
    for s in range(cfg.restarts):
        g0 = np.zeros(A.size**K) if s == 0 else rng.normal(0.0, 1.0, A.size**K)
        F, x, it, conv = _descend(target, g0, A, cfg)
        total_iter += it
        starts.append({"start": s, "value": F, "iterations": it, "converged": conv})
        if best is None or F < best[0]:
            best = (F, x, conv)
    F, x, conv = best
    g = Potential(A, x.reshape((A.size,) * K))
    g = g - solve(g).log_lambda
    hs = specific_entropy_markov(mu)
    gen = markov_generator(mu)
    check = math.nan
    if gen is not None:
        check = variational_objective(mu, gen) - hs
    return VariationalReport(h_v=F, minimizer=g, h_s=hs, gap=abs(F - hs), pressure_check=check,
                             iterations=total_iter, converged=conv, starts=starts)


def markov_generator(mu: MarkovMeasure) -> Potential | None:
    """``log(mu[a u] / (p_a mu[u]))``, the normalized potential whose Gibbs measure is mu.

    ``None`` when some block weight vanishes (the infimum is then not attained).
    """
    m = mu.alphabet.size
    r = mu.order
    blk = mu.block.reshape(m, m**r)
    if np.any(blk <= 0):
        return None
    tail = mu.block.sum(axis=0).reshape(-1)
    vals = np.log(blk) - np.log(mu.alphabet.weights)[:, None] - np.log(tail)[None, :]
    return Potential(mu.alphabet, vals.reshape((m,) * (r + 1)))


def equilibrium_state(f: Potential, S: SpectralData | None = None) -> MarkovMeasure:
    S = S or solve(f)
    return gibbs_from_normalized(normalize(f, S))


def variational_sum(mu: MarkovMeasure, f: Potential) -> float:
    """``h^s(mu) + int f dmu``."""
    return specific_entropy_markov(mu) + integrate_local(mu, f)


def pressure_variational_check(f: Potential, trials: int = 100, seed: int = 0) -> dict:
    """Compare ``h^s(mu) + int f dmu`` against ``log lambda_f`` over random Markov measures and mu_f."""
    S = solve(f)
    mu_f = equilibrium_state(f, S)
    order = max(f.depth - 1, 1)
    values, deficits = [], []
    for i in range(trials):
        mu = random_markov(f.alphabet, seed + i, order=order)
        v = variational_sum(mu, f)
        values.append(v)
        deficits.append(S.log_lambda - v)
    at_eq = variational_sum(mu_f, f)
    excess = max([v - S.log_lambda for v in values] + [at_eq - S.log_lambda])
    return {
        "log_lambda": S.log_lambda,
        "max_random": max(values) if values else -math.inf,
        "at_equilibrium": at_eq,
        "equilibrium_residual": abs(at_eq - S.log_lambda),
        "max_excess": excess,
        "min_deficit": min(deficits) if deficits else math.inf,
        "trials": trials,
    }


def uniqueness_probe(f: Potential, trials: int = 100, eps: float = 0.05, seed: int = 0) -> dict:
    """Relative entropy rate of random perturbations of the equilibrium state.

    Each trial tilts the forward transitions of ``mu_f`` by ``exp(eps * Z)``
    and also by ``exp(eps/2 * Z)``; the ratio of the two rates gives the
    local order in eps (about 2 for a smooth minimum).
    """
    if eps < 0:
        raise InvalidArgument("eps must be >= 0")
    S = solve(f)
    mu_f = equilibrium_state(f, S)
    rng = np.random.default_rng(seed)
    shape = _forward_transitions(mu_f).shape
    rates, dists, orders = [], [], []
    violations = 0
    for _ in range(trials):
        Z = rng.normal(size=shape)
        mu_e = perturb(mu_f, eps, Z)
        h = relative_entropy_rate(mu_e, f, S)
        d = pair_distance(mu_e, mu_f)
        rates.append(h)
        dists.append(d)
        if d > 1e-8 and not h > 0:
            violations += 1
        if eps > 0:
            h_half = relative_entropy_rate(perturb(mu_f, eps / 2, Z), f, S)
            if h > 0 and h_half > 0:
                orders.append(math.log2(h / h_half))
    return {
        "eps": eps,
        "trials": trials,
        "min_rate": min(rates) if rates else math.nan,
        "max_rate": max(rates) if rates else math.nan,
        "min_distance": min(dists) if dists else math.nan,
        "violations": violations,
        "order_mean": float(np.mean(orders)) if orders else math.nan,
        "order_median": float(np.median(orders)) if orders else math.nan,
    }
