"""Penalty encoding of unit-commitment instances as spin Hamiltonians.

The pipeline is: linear aggregates over binary unit/slack variables ->
quadratic binary polynomial (constraints folded in as squared penalties) ->
two-local spin model via x = (1 - z)/2, z in {+1, -1}.

Variable convention, used everywhere downstream: variable i (1-based) sits
on qubit i-1, which is bit i-1 of a basis-state index. Bitstrings are
rendered x_1 x_2 ... x_{n+k} left to right, so the leftmost character is
the least significant bit. Binary 0 maps to spin +1, binary 1 to spin -1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence, TextIO

import numpy as np

from .model import UCInstance, unit_cost

__all__ = [
    "Aggregates",
    "QuboPolynomial",
    "IsingModel",
    "aggregates",
    "build_qubo",
    "to_ising",
    "ising_energy",
    "index_to_bitstring",
    "bitstring_to_index",
    "write_coefficients",
]


def index_to_bitstring(index: int, width: int) -> str:
    """Render a basis-state index as x_1..x_width (LSB first)."""
    return "".join("1" if (index >> b) & 1 else "0" for b in range(width))


def bitstring_to_index(bits: str) -> int:
    """Inverse of `index_to_bitstring`."""
    return sum(1 << b for b, ch in enumerate(bits) if ch == "1")


@dataclass(frozen=True)
class Aggregates:
    """Linear forms over binary variables that assemble the objective.

    cost/power/max_power run over unit variables 1..n; slack runs over
    variables n+1..n+k with coefficients 2^(j-1). For balance-only
    instances max_power and slack are empty.
    """

    cost: dict[int, float]
    power: dict[int, float]
    max_power: dict[int, float]
    slack: dict[int, float]

    @staticmethod
    def evaluate(form: Mapping[int, float], x: Sequence[int]) -> float:
        """Evaluate a linear form at a 0/1 assignment (x[0] is variable 1)."""
        return sum(coeff * x[i - 1] for i, coeff in form.items())


def aggregates(instance: UCInstance) -> Aggregates:
    """The four linear forms for an instance, in canonical variable order."""
    n = instance.n
    cost = {i: unit_cost(u) for i, u in enumerate(instance.units, start=1)}
    power = {i: u.p for i, u in enumerate(instance.units, start=1)}
    if not instance.double_constraint:
        return Aggregates(cost=cost, power=power, max_power={}, slack={})
    max_power = {i: u.p_max for i, u in enumerate(instance.units, start=1)}
    slack = {n + j: float(2 ** (j - 1)) for j in range(1, instance.penalty.k + 1)}
    return Aggregates(cost=cost, power=power, max_power=max_power, slack=slack)


@dataclass
class QuboPolynomial:
    """Degree-2 polynomial over binary variables 1..n_vars.

    `quadratic` keys are ordered pairs (i, j) with i < j; squares are folded
    into `linear` using x^2 = x.
    """

    n_vars: int
    linear: dict[int, float] = field(default_factory=dict)
    quadratic: dict[tuple[int, int], float] = field(default_factory=dict)
    constant: float = 0.0

    def add_linear(self, i: int, coeff: float) -> None:
        self.linear[i] = self.linear.get(i, 0.0) + coeff

    def add_quadratic(self, i: int, j: int, coeff: float) -> None:
        if i == j:
            raise ValueError("self-pair in quadratic term")
        if i > j:
            i, j = j, i
        self.quadratic[(i, j)] = self.quadratic.get((i, j), 0.0) + coeff

    def add_squared_form(self, form: Mapping[int, float], shift: float, weight: float) -> None:
        """Add weight * (sum_i form[i]*x_i + shift)^2, expanded with x^2 = x."""
        items = sorted(form.items())
        for idx, (i, wi) in enumerate(items):
            self.add_linear(i, weight * (wi * wi + 2.0 * shift * wi))
            for j, wj in items[idx + 1 :]:
                self.add_quadratic(i, j, weight * 2.0 * wi * wj)
        self.constant += weight * shift * shift

    def evaluate(self, x: Sequence[int]) -> float:
        if len(x) != self.n_vars:
            raise ValueError(f"assignment length {len(x)} != n_vars {self.n_vars}")
        value = self.constant
        for i, coeff in self.linear.items():
            value += coeff * x[i - 1]
        for (i, j), coeff in self.quadratic.items():
            value += coeff * x[i - 1] * x[j - 1]
        return value


def build_qubo(instance: UCInstance) -> QuboPolynomial:
    """Penalized objective of an instance as a binary polynomial.

    cost + lambda1*(power - load)^2, plus
    lambda2*(max_power - c_c*slack - load - spare)^2 when spare-constrained.
    """
    agg = aggregates(instance)
    poly = QuboPolynomial(n_vars=instance.n_vars)
    for i, coeff in agg.cost.items():
        poly.add_linear(i, coeff)
    poly.add_squared_form(agg.power, -instance.load, instance.penalty.lambda1)
    if instance.double_constraint:
        c_c = instance.penalty.c_c
        combined = dict(agg.max_power)
        for i, coeff in agg.slack.items():
            combined[i] = -c_c * coeff
        poly.add_squared_form(
            combined, -(instance.load + instance.spare), instance.penalty.lambda2
        )
    return poly


@dataclass(eq=False)
class IsingModel:
    """Two-local spin Hamiltonian: offset + sum h_i z_i + sum J_ij z_i z_j.

    `h` is keyed by spin index 1..n_vars, `coupling` by ordered pairs
    (i, j), i < j. The constant offset is kept so feasible states report
    their true cost.
    """

    n_vars: int
    h: dict[int, float] = field(default_factory=dict)
    coupling: dict[tuple[int, int], float] = field(default_factory=dict)
    offset: float = 0.0

    def energy(self, z: Sequence[int]) -> float:
        """Energy of one spin assignment (entries +1/-1, z[0] is spin 1)."""
        if len(z) != self.n_vars:
            raise ValueError(f"assignment length {len(z)} != n_vars {self.n_vars}")
        value = self.offset
        for i, coeff in self.h.items():
            value += coeff * z[i - 1]
        for (i, j), coeff in self.coupling.items():
            value += coeff * z[i - 1] * z[j - 1]
        return value

    @cached_property
    def energy_table(self) -> np.ndarray:
        """Energies of all 2^n_vars basis states, indexed per bit convention.

        Built once per model; turns every diagonal expectation into a dot
        product over probabilities.
        """
        idx = np.arange(1 << self.n_vars, dtype=np.int64)
        table = np.full(idx.shape, self.offset, dtype=np.float64)

        def spin(i: int) -> np.ndarray:
            return 1.0 - 2.0 * ((idx >> (i - 1)) & 1)

        if self.n_vars <= 20:
            # Small enough to keep one +/-1 column per spin.
            cache = {i: spin(i) for i in set(self.h) | {v for p in self.coupling for v in p}}
            get = cache.__getitem__
        else:
            get = spin
        for i, coeff in sorted(self.h.items()):
            table += coeff * get(i)
        for (i, j), coeff in sorted(self.coupling.items()):
            table += coeff * (get(i) * get(j))
        return table

    def split(self, block_sizes: Sequence[int]) -> "ModelSplit":
        """Group terms by register block for product-state evaluation."""
        if sum(block_sizes) != self.n_vars:
            raise ValueError("block sizes must cover all spins")
        return ModelSplit.build(self, tuple(block_sizes))


@dataclass(frozen=True)
class ModelSplit:
    """An IsingModel regrouped over contiguous spin blocks.

    `block_tables` hold each block's internal terms over its local basis
    states (offset excluded); `cross` lists inter-block couplings as
    (block_a, local_i, block_b, local_j, coefficient).
    """

    offset: float
    block_sizes: tuple[int, ...]
    block_tables: tuple[np.ndarray, ...]
    cross: tuple[tuple[int, int, int, int, float], ...]

    @staticmethod
    def build(model: IsingModel, block_sizes: tuple[int, ...]) -> "ModelSplit":
        starts = np.cumsum((0,) + block_sizes[:-1])

        def locate(var: int) -> tuple[int, int]:
            qubit = var - 1
            for b, start in enumerate(starts):
                if start <= qubit < start + block_sizes[b]:
                    return b, qubit - start
            raise ValueError(f"variable {var} outside blocks")

        tables = [np.zeros(1 << size) for size in block_sizes]
        locals_z = [
            [1.0 - 2.0 * ((np.arange(1 << size) >> t) & 1) for t in range(size)]
            for size in block_sizes
        ]
        for i, coeff in model.h.items():
            b, t = locate(i)
            tables[b] += coeff * locals_z[b][t]
        cross = []
        for (i, j), coeff in sorted(model.coupling.items()):
            bi, ti = locate(i)
            bj, tj = locate(j)
            if bi == bj:
                tables[bi] += coeff * (locals_z[bi][ti] * locals_z[bi][tj])
            else:
                cross.append((bi, ti, bj, tj, coeff))
        return ModelSplit(
            offset=model.offset,
            block_sizes=block_sizes,
            block_tables=tuple(tables),
            cross=tuple(cross),
        )


def to_ising(poly: QuboPolynomial) -> IsingModel:
    """Substitute x_i = (1 - z_i)/2 and collect two-local spin terms."""
    model = IsingModel(n_vars=poly.n_vars, offset=poly.constant)

    def add_h(i: int, coeff: float) -> None:
        model.h[i] = model.h.get(i, 0.0) + coeff

    for i, coeff in poly.linear.items():
        # c*x = c/2 - (c/2) z
        model.offset += coeff / 2.0
        add_h(i, -coeff / 2.0)
    for (i, j), coeff in poly.quadratic.items():
        # c*x_i*x_j = c/4 (1 - z_i - z_j + z_i z_j)
        model.offset += coeff / 4.0
        add_h(i, -coeff / 4.0)
        add_h(j, -coeff / 4.0)
        model.coupling[(i, j)] = model.coupling.get((i, j), 0.0) + coeff / 4.0
    return model


def ising_energy(model: IsingModel, z: Sequence[int]) -> float:
    """Energy of one spin assignment; wrapper over `IsingModel.energy`."""
    return model.energy(z)


def encode(instance: UCInstance) -> IsingModel:
    """Shorthand for to_ising(build_qubo(instance))."""
    return to_ising(build_qubo(instance))


def write_coefficients(model: IsingModel, out: TextIO) -> None:
    """Plain-text coefficient list: offset line, then `i j value` triples.

    Rows with i == j carry linear terms. Readable by external QUBO/Ising
    tooling.
    """
    out.write(f"offset {model.offset!r}\n")
    for i in sorted(model.h):
        out.write(f"{i} {i} {model.h[i]!r}\n")
    for i, j in sorted(model.coupling):
        out.write(f"{i} {j} {model.coupling[(i, j)]!r}\n")


def read_coefficients(lines: Iterable[str]) -> IsingModel:
    """Parse the `write_coefficients` format back into a model."""
    offset = 0.0
    h: dict[int, float] = {}
    coupling: dict[tuple[int, int], float] = {}
    n_vars = 0
    for line in lines:
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "offset":
            offset = float(parts[1])
            continue
        i, j, value = int(parts[0]), int(parts[1]), float(parts[2])
        n_vars = max(n_vars, i, j)
        if i == j:
            h[i] = value
        else:
            coupling[(min(i, j), max(i, j))] = value
    return IsingModel(n_vars=n_vars, h=h, coupling=coupling, offset=offset)
