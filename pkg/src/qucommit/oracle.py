"""Exhaustive ground truth for encodings and variational results.

Deliberately brute force: every assignment is enumerated, in ascending
integer order, and ties are broken toward the lexicographically smallest
bitstring. Capped at 24 variables.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .encoding import IsingModel, index_to_bitstring
from .errors import CapacityError
from .model import UCInstance, unit_cost

__all__ = ["MAX_ENUM_VARS", "OracleResult", "exact_qubo_min", "exact_uc"]

MAX_ENUM_VARS = 24


@dataclass(frozen=True)
class OracleResult:
    """Outcome of an exhaustive search.

    `best_assignment` is None only for an infeasible constrained search,
    in which case `feasible` is False and `best_value` is +inf.
    """

    best_assignment: str | None
    best_value: float
    feasible: bool
    ties: int


def _bit_reversed(indices: np.ndarray, width: int) -> np.ndarray:
    # Lexicographic order of LSB-first bitstrings == numeric order of the
    # bit-reversed index.
    rev = np.zeros_like(indices)
    for b in range(width):
        rev |= ((indices >> b) & 1) << (width - 1 - b)
    return rev


def _pick(indices: np.ndarray, width: int) -> tuple[str, int]:
    rev = _bit_reversed(indices, width)
    winner = int(indices[np.argmin(rev)])
    return index_to_bitstring(winner, width), len(indices)


def exact_qubo_min(model: IsingModel) -> OracleResult:
    """Global minimum of a spin Hamiltonian over all 2^n_vars assignments."""
    if model.n_vars > MAX_ENUM_VARS:
        raise CapacityError(
            f"{model.n_vars} variables exceed the enumeration cap {MAX_ENUM_VARS}"
        )
    table = model.energy_table
    best = float(table.min())
    candidates = np.flatnonzero(table == best)
    assignment, ties = _pick(candidates, model.n_vars)
    return OracleResult(best_assignment=assignment, best_value=best, feasible=True, ties=ties)


def exact_uc(instance: UCInstance, balance_tol: float | None = None) -> OracleResult:
    """Cheapest unit subset meeting the load (and spare, when present).

    Feasibility: |sum p_i x_i - load| <= balance_tol, and when a spare
    requirement is present, sum p_max_i x_i >= load + spare. Returns an
    infeasible report instead of raising when no subset qualifies.
    """
    n = instance.n
    if n > MAX_ENUM_VARS:
        raise CapacityError(f"{n} units exceed the enumeration cap {MAX_ENUM_VARS}")
    if balance_tol is None:
        balance_tol = 1e-9 * max(1.0, instance.load)
    idx = np.arange(1 << n, dtype=np.int64)
    bits = [(idx >> i) & 1 for i in range(n)]
    power = np.zeros(len(idx))
    cost = np.zeros(len(idx))
    for i, u in enumerate(instance.units):
        power += u.p * bits[i]
        cost += unit_cost(u) * bits[i]
    feasible = np.abs(power - instance.load) <= balance_tol
    if instance.double_constraint:
        max_power = np.zeros(len(idx))
        for i, u in enumerate(instance.units):
            max_power += u.p_max * bits[i]
        floor = instance.load + instance.spare
        feasible &= max_power >= floor - 1e-9 * max(1.0, floor)
    if not feasible.any():
        return OracleResult(
            best_assignment=None, best_value=float("inf"), feasible=False, ties=0
        )
    masked = np.where(feasible, cost, np.inf)
    best = float(masked.min())
    candidates = np.flatnonzero(masked == best)
    assignment, ties = _pick(candidates, n)
    return OracleResult(best_assignment=assignment, best_value=best, feasible=True, ties=ties)
