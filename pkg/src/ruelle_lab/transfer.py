"""Ruelle transfer operator of a depth-k potential and its maximal spectral data."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .alphabet import Alphabet
from .errors import ContractViolation, InvalidArgument, NonConvergence, TransferOverflow, check_budget
from .potential import Potential
from .symbolic import word_array

DEFAULT_TOL = 1e-13
DEFAULT_MAX_ITER = 100_000


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    """Matrix of the transfer operator on functions of the first ``order`` coordinates.

    Row ``u`` collects the one-symbol extensions ``a u``:
    ``entries[u, (a, u_1..u_{order-1})] = p_a * exp(f(a u))``.
    """

    potential: Potential
    entries: np.ndarray

    @property
    def alphabet(self) -> Alphabet:
        return self.potential.alphabet

    @property
    def order(self) -> int:
        return self.potential.depth - 1

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def apply(self, phi: np.ndarray) -> np.ndarray:
        return self.entries @ phi

    def apply_dual(self, nu: np.ndarray) -> np.ndarray:
        return self.entries.T @ nu


@dataclass
class SpectralData:
    lam: float
    log_lambda: float
    h: np.ndarray
    nu: np.ndarray
    residuals: dict = field(default_factory=dict)
    iterations: int = 0

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "log_lambda": self.log_lambda,
            "h": self.h.tolist(),
            "nu": self.nu.tolist(),
            "residuals": dict(self.residuals),
            "iterations": self.iterations,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "SpectralData":
        return cls(lam=float(data["lambda"]), log_lambda=float(data["log_lambda"]),
                   h=np.asarray(data["h"], dtype=float), nu=np.asarray(data["nu"], dtype=float),
                   residuals=dict(data.get("residuals", {})), iterations=int(data.get("iterations", 0)))


def build(f: Potential, alphabet: Alphabet | None = None) -> TransferMatrix:
    """Assemble the transfer matrix of ``f``; depth-1 potentials are lifted to depth 2."""
    if alphabet is not None and alphabet is not f.alphabet and alphabet.to_dict() != f.alphabet.to_dict():
        raise InvalidArgument("potential and alphabet disagree")
    if f.depth < 2:
        f = f.lift(2)
    m = f.alphabet.size
    r = f.depth - 1
    size = check_budget(m, r)
    p = f.alphabet.weights
    with np.errstate(over="ignore"):
        ef = np.exp(f.values)
    if not np.all(np.isfinite(ef)):
        raise TransferOverflow("exp(f) overflows; shift or rescale the potential")
    # ext[a, u] = p_a exp(f(a u)) with u a word of length r
    ext = (p.reshape((m,) + (1,) * r) * ef).reshape(m, size)
    M = np.zeros((size, size))
    words = word_array(m, r)
    tail_idx = words[:, : r - 1] @ (m ** np.arange(r - 2, -1, -1, dtype=np.int64)) if r > 1 else np.zeros(size, dtype=np.int64)
    cols = np.arange(m)[:, None] * m ** (r - 1) + tail_idx[None, :]
    M[np.arange(size)[None, :], cols] = ext
    return TransferMatrix(f, M)


def _normalize(v: np.ndarray) -> np.ndarray:
    return v / np.max(np.abs(v))


def rpf_solve(M: TransferMatrix, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
              h0: np.ndarray | None = None, nu0: np.ndarray | None = None) -> SpectralData:
    """Maximal eigenvalue, eigenfunction and eigenmeasure by power iteration.

    A few rounds of normalized repeated squaring (power iteration with
    doubling exponent) seed the vectors; plain power iteration on the matrix
    and its transpose then runs until both the Rayleigh quotient and the
    vectors change by less than ``tol`` (relative). Normalization:
    ``sum(nu) == 1`` and ``sum(h * nu) == 1``.
    """
    if tol <= 0:
        raise InvalidArgument("tol must be positive")
    A = M.entries
    if np.any(A < 0) or not np.all(np.isfinite(A)):
        raise ContractViolation("transfer matrix must be finite and nonnegative")
    n = A.shape[0]
    iterations = 0

    if h0 is None or nu0 is None:
        P = A / A.max()
        for _ in range(64):
            Q = P @ P
            iterations += 1
            Q = Q / Q.max()
            done = np.allclose(Q, P, rtol=tol, atol=0.0)
            P = Q
            if done:
                break
        h = _normalize(P @ np.ones(n))
        nu = P.T @ np.ones(n)
        nu = nu / nu.sum()
    else:
        h = _normalize(np.asarray(h0, dtype=float))
        nu = np.asarray(nu0, dtype=float)
        nu = nu / nu.sum()

    lam_prev = math.nan
    for it in range(max_iter):
        Ah = A @ h
        lam = float(np.dot(nu, Ah) / np.dot(nu, h))
        h_next = _normalize(Ah)
        nu_next = A.T @ nu
        nu_next = nu_next / nu_next.sum()
        dh = np.max(np.abs(h_next - h))
        dnu = np.max(np.abs(nu_next - nu)) / np.max(nu_next)
        h, nu = h_next, nu_next
        iterations += 1
        if abs(lam - lam_prev) <= tol * lam and dh <= tol and dnu <= tol:
            break
        lam_prev = lam
    else:
        res = float(np.max(np.abs(A @ h - lam * h)))
        raise NonConvergence("power iteration did not converge", res, iterations)

    if np.any(h <= 0):
        raise NonConvergence("eigenfunction lost positivity", float(-h.min()), iterations)
    h = h / float(np.dot(h, nu))
    lam = float(np.dot(nu, A @ h))
    residuals = {
        "eigenfunction": float(np.max(np.abs(A @ h - lam * h)) / lam / np.max(h)),
        "eigenmeasure": float(np.sum(np.abs(A.T @ nu - lam * nu)) / lam),
        "normalization": float(abs(np.dot(h, nu) - 1.0)),
    }
    return SpectralData(lam=lam, log_lambda=math.log(lam), h=h, nu=nu,
                        residuals=residuals, iterations=iterations)


def solve(f: Potential, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> SpectralData:
    return rpf_solve(build(f), tol=tol, max_iter=max_iter)


def normalize(f: Potential, S: SpectralData) -> Potential:
    """Cohomologous normalized potential ``f + log h - log h o sigma - log lambda``."""
    g = f.lift(max(f.depth, 2))
    m = g.alphabet.size
    r = g.depth - 1
    if S.h.size != m**r:
        raise InvalidArgument("spectral data does not match the potential's order")
    logh = np.log(S.h).reshape((m,) * r)
    head = logh.reshape((m,) * r + (1,))   # h(x_1..x_r)
    tail = logh.reshape((1,) + (m,) * r)   # h(x_2..x_{r+1})
    return Potential(g.alphabet, g.values + head - tail - S.log_lambda)


def normalization_residual(fbar: Potential) -> float:
    """``max_x |L_fbar 1 (x) - 1|``."""
    M = build(fbar)
    return float(np.max(np.abs(M.entries.sum(axis=1) - 1.0)))


def is_normalized(fbar: Potential, tol: float = 1e-10) -> bool:
    return normalization_residual(fbar) <= tol


def apply_n(M: TransferMatrix, phi: np.ndarray, n: int) -> np.ndarray:
    if n < 0:
        raise InvalidArgument("n must be >= 0")
    out = np.asarray(phi, dtype=float).copy()
    for _ in range(n):
        out = M.entries @ out
    return out


def log_norm_iterates(f: Potential, n: int) -> np.ndarray:
    """``log ||L^j 1||_inf`` for j = 1..n, accumulated in log space."""
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    A = build(f).entries
    v = np.ones(A.shape[0])
    acc = 0.0
    out = np.empty(n)
    for j in range(n):
        v = A @ v
        s = float(np.max(np.abs(v)))
        acc += math.log(s)
        v = v / s
        out[j] = acc
    return out


def spectral_radius_estimate(f: Potential, n: int, S: SpectralData | None = None) -> dict:
    """``||L^n 1||_inf^(1/n)`` and its gap to the power-iteration eigenvalue."""
    logs = log_norm_iterates(f, n)
    value = math.exp(logs[-1] / n)
    lam = (S or solve(f)).lam
    return {"n": n, "value": value, "lambda": lam, "gap": abs(value - lam)}
