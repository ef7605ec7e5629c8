"""Exception types raised by ruelle_lab."""

from __future__ import annotations

import os

DEFAULT_BUDGET = 2**24


class RuelleLabError(Exception):
    """Base class for all library errors."""


class InvalidArgument(RuelleLabError, ValueError):
    pass


class DegenerateMeasure(RuelleLabError, ValueError):
    """A priori measure without full support (or with zero mass)."""


class EnumerationTooLarge(RuelleLabError):
    def __init__(self, count: int, budget: int):
        super().__init__(f"enumeration of {count} words exceeds budget {budget} "
                         f"(set RUELLE_LAB_BUDGET to raise it)")
        self.count = count
        self.budget = budget


class NonConvergence(RuelleLabError):
    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(f"{message} (residual={residual:.3e}, iterations={iterations})")
        self.residual = residual
        self.iterations = iterations


class ContractViolation(RuelleLabError):
    """Input violates a documented precondition, e.g. a non-normalized potential."""


class TransferOverflow(RuelleLabError, OverflowError):
    pass


def enumeration_budget() -> int:
    raw = os.environ.get("RUELLE_LAB_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise InvalidArgument(f"RUELLE_LAB_BUDGET must be an integer, got {raw!r}")
    if value < 1:
        raise InvalidArgument("RUELLE_LAB_BUDGET must be positive")
    return value


def check_budget(m: int, n: int) -> int:
    """Return m**n, raising EnumerationTooLarge if it exceeds the budget."""
    count = m**n
    budget = enumeration_budget()
    if count > budget:
        raise EnumerationTooLarge(count, budget)
    return count
