"""Dense statevector simulation for the layered circuits.

Qubit t is bit t of the amplitude index (qubit 0 least significant), which
matches the variable convention in `encoding`. Gate application mutates a
state in place; callers that need the original should copy first.

Because every Hamiltonian here is diagonal in the computational basis,
expectation values reduce to a dot product between the probability vector
and a precomputed per-basis-state energy table; no operator matrices are
ever materialized. Partitioned circuits are simulated block by block and
evaluated on the product distribution, so a (n, k) split costs
2^n + 2^k amplitudes instead of 2^(n+k).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TextIO, Union

import numpy as np

from .ansatz import AnsatzCircuit, BoundCircuit
from .encoding import IsingModel, index_to_bitstring
from .errors import CapacityError, PartitionError

__all__ = [
    "MAX_QUBITS",
    "StateVector",
    "PartitionedState",
    "init_zero",
    "run_circuit",
    "run_partitioned",
    "simulate",
    "expectation",
    "sample",
    "dump_amplitudes",
]

# Full dense simulation cap: 2^26 complex doubles is ~1 GiB.
MAX_QUBITS = 26


class StateVector:
    """Amplitudes of one register, length exactly 2^q."""

    __slots__ = ("q", "amps")

    def __init__(self, q: int, amps: np.ndarray):
        if amps.shape != (1 << q,):
            raise ValueError(f"expected {1 << q} amplitudes, got {amps.shape}")
        self.q = q
        self.amps = amps

    def copy(self) -> "StateVector":
        return StateVector(self.q, self.amps.copy())

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def norm_sq(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def _check_target(self, target: int) -> None:
        if not 0 <= target < self.q:
            raise ValueError(f"qubit index {target} out of range for q={self.q}")

    def apply_rotation(self, target: int, axis: str, angle: float) -> None:
        """Apply exp(-i*angle*sigma_axis/2) on one qubit."""
        self._check_target(target)
        half = 0.5 * angle
        c, s = np.cos(half), np.sin(half)
        view = self.amps.reshape(-1, 2, 1 << target)
        lo, hi = view[:, 0, :], view[:, 1, :]
        if axis == "z":
            lo *= complex(c, -s)
            hi *= complex(c, s)
            return
        tmp = lo.copy()
        if axis == "y":
            view[:, 0, :] = c * tmp - s * hi
            view[:, 1, :] = s * tmp + c * hi
        elif axis == "x":
            view[:, 0, :] = c * tmp - 1j * s * hi
            view[:, 1, :] = -1j * s * tmp + c * hi
        else:
            raise ValueError(f"unknown rotation axis {axis!r}")

    def apply_cnot(self, control: int, target: int) -> None:
        """Flip the target bit on basis states whose control bit is set."""
        self._check_target(target)
        self._check_target(control)
        if control == target:
            raise ValueError("control and target must differ")
        hi_bit, lo_bit = max(control, target), min(control, target)
        view = self.amps.reshape(-1, 2, 1 << (hi_bit - lo_bit - 1), 2, 1 << lo_bit)
        if control == hi_bit:
            a, b = view[:, 1, :, 0, :], view[:, 1, :, 1, :]
        else:
            a, b = view[:, 0, :, 1, :], view[:, 1, :, 1, :]
        tmp = a.copy()
        a[...] = b
        b[...] = tmp

    def apply_pauli(self, target: int, axis: str) -> None:
        """Apply a bare Pauli operator (used by gradient back-propagation)."""
        self._check_target(target)
        view = self.amps.reshape(-1, 2, 1 << target)
        lo, hi = view[:, 0, :], view[:, 1, :]
        if axis == "z":
            hi *= -1.0
        elif axis == "x":
            tmp = lo.copy()
            view[:, 0, :] = hi
            view[:, 1, :] = tmp
        elif axis == "y":
            tmp = lo.copy()
            view[:, 0, :] = -1j * hi
            view[:, 1, :] = 1j * tmp
        else:
            raise ValueError(f"unknown Pauli axis {axis!r}")


@dataclass(frozen=True)
class PartitionedState:
    """Tensor-product state: one StateVector per contiguous block."""

    blocks: tuple[StateVector, ...]

    @property
    def block_offsets(self) -> tuple[int, ...]:
        offsets, start = [], 0
        for block in self.blocks:
            offsets.append(start)
            start += block.q
        return tuple(offsets)

    @property
    def q(self) -> int:
        return sum(block.q for block in self.blocks)

    def to_statevector(self) -> StateVector:
        """Materialize the full product state (test/debug helper)."""
        amps = np.ones(1, dtype=np.complex128)
        for block in self.blocks:
            # Later blocks occupy higher bits, hence kron(block, running).
            amps = np.kron(block.amps, amps)
        return StateVector(self.q, amps)


def init_zero(q: int) -> StateVector:
    """The all-zero computational basis state on q qubits."""
    if not 1 <= q <= MAX_QUBITS:
        raise CapacityError(f"qubit count {q} outside supported range 1..{MAX_QUBITS}")
    amps = np.zeros(1 << q, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(q, amps)


def _apply_gates(state: StateVector, bound: BoundCircuit, offset: int = 0) -> None:
    for gate in bound.circuit.gates:
        if gate.is_rotation:
            state.apply_rotation(gate.target - offset, gate.axis, bound.angle(gate))
        else:
            state.apply_cnot(gate.control - offset, gate.target - offset)


def run_circuit(bound: BoundCircuit) -> StateVector:
    """Simulate the whole register from |0...0>."""
    state = init_zero(bound.circuit.n_qubits)
    _apply_gates(state, bound)
    return state


def _block_of(partition: tuple[int, ...]) -> list[int]:
    owner = []
    for b, size in enumerate(partition):
        owner.extend([b] * size)
    return owner


def run_partitioned(bound: BoundCircuit) -> PartitionedState:
    """Simulate each declared block independently.

    Raises PartitionError when no partition is declared or a CNOT crosses a
    block border.
    """
    circuit = bound.circuit
    if circuit.partition is None:
        raise PartitionError("circuit declares no partition")
    owner = _block_of(circuit.partition)
    for gate in circuit.gates:
        if gate.kind == "cnot" and owner[gate.control] != owner[gate.target]:
            raise PartitionError(
                f"CNOT {gate.control}->{gate.target} crosses the block boundary"
            )
    blocks = []
    start = 0
    for b, size in enumerate(circuit.partition):
        block = init_zero(size)
        for gate in circuit.gates:
            if owner[gate.target] != b:
                continue
            if gate.is_rotation:
                block.apply_rotation(gate.target - start, gate.axis, bound.angle(gate))
            else:
                block.apply_cnot(gate.control - start, gate.target - start)
        blocks.append(block)
        start += size
    return PartitionedState(blocks=tuple(blocks))


State = Union[StateVector, PartitionedState]


def simulate(bound: BoundCircuit) -> State:
    """Run a bound circuit, using the partitioned path when declared."""
    if bound.circuit.partition is not None:
        return run_partitioned(bound)
    return run_circuit(bound)


def expectation(state: State, model: IsingModel) -> float:
    """<H> of a diagonal spin Hamiltonian over a (product) state."""
    if state.q != model.n_vars:
        raise ValueError(f"state has {state.q} qubits, model has {model.n_vars} spins")
    if isinstance(state, StateVector):
        return float(state.probabilities() @ model.energy_table)
    split = model.split(tuple(block.q for block in state.blocks))
    probs = [block.probabilities() for block in state.blocks]
    value = split.offset
    for p, table in zip(probs, split.block_tables):
        value += float(p @ table)
    # Cross-block couplings factor into products of single-spin means.
    needed = {(c[0], c[1]) for c in split.cross} | {(c[2], c[3]) for c in split.cross}
    mean_z = {}
    for b, t in sorted(needed):
        bits = (np.arange(1 << state.blocks[b].q) >> t) & 1
        mean_z[(b, t)] = float(probs[b] @ (1.0 - 2.0 * bits))
    for bi, ti, bj, tj, coeff in split.cross:
        value += coeff * mean_z[(bi, ti)] * mean_z[(bj, tj)]
    return value


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample(state: State, shots: int, seed) -> dict[str, int]:
    """Draw measurement outcomes; returns bitstring -> count.

    `seed` is an integer or a numpy Generator; identical seeds give
    identical counts.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = _as_rng(seed)
    if isinstance(state, StateVector):
        indices = _draw(rng, state, shots)
    else:
        indices = np.zeros(shots, dtype=np.int64)
        offset = 0
        for block in state.blocks:
            indices |= _draw(rng, block, shots) << offset
            offset += block.q
    values, counts = np.unique(indices, return_counts=True)
    width = state.q
    return {index_to_bitstring(int(v), width): int(c) for v, c in zip(values, counts)}


def _draw(rng: np.random.Generator, state: StateVector, shots: int) -> np.ndarray:
    probs = state.probabilities()
    probs = probs / probs.sum()
    return rng.choice(len(probs), size=shots, p=probs)


def dump_amplitudes(state: StateVector, out: TextIO) -> None:
    """Debug dump: one `index re im` line per amplitude."""
    for index, amp in enumerate(state.amps):
        out.write(f"{index} {amp.real!r} {amp.imag!r}\n")
