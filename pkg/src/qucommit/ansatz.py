"""Layered variational circuits with a fixed parameter layout.

Both circuit families apply, per layer and per qubit, fresh-parameter
rotations in the order RY, RZ, RX, followed by a nearest-neighbour CNOT
chain. The partially connected family drops the chain link between the
unit register and the slack register in every layer and declares the two
blocks, which makes the circuit a tensor product by construction.

Parameter slots are layer-major, then qubit, then axis (y, z, x), so the
same (qubits, layers, kind) always yields the same layout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Gate",
    "AnsatzCircuit",
    "BoundCircuit",
    "build_hea",
    "build_pcqnn",
    "bind",
    "draw",
]

ROTATION_AXES = ("y", "z", "x")


@dataclass(frozen=True)
class Gate:
    """One circuit element: a parametrized rotation or a CNOT."""

    kind: str  # "ry" | "rz" | "rx" | "cnot"
    target: int
    control: int | None = None
    param_slot: int | None = None

    @property
    def is_rotation(self) -> bool:
        return self.kind != "cnot"

    @property
    def axis(self) -> str:
        return self.kind[1]


@dataclass(frozen=True)
class AnsatzCircuit:
    """Ordered gate list plus layout metadata.

    `partition`, when present, lists contiguous block sizes (low qubits
    first); a partitioned circuit must not entangle across block borders.
    """

    n_qubits: int
    gates: tuple[Gate, ...]
    param_count: int
    layers: int
    kind: str
    partition: tuple[int, ...] | None = None

    def cnot_count(self) -> int:
        return sum(1 for g in self.gates if g.kind == "cnot")


def _layered(q: int, d: int, skip_cnot_control: int | None) -> tuple[Gate, ...]:
    gates: list[Gate] = []
    slot = 0
    for _ in range(d):
        for qubit in range(q):
            for axis in ROTATION_AXES:
                gates.append(Gate(kind=f"r{axis}", target=qubit, param_slot=slot))
                slot += 1
        for control in range(q - 1):
            if control == skip_cnot_control:
                continue
            gates.append(Gate(kind="cnot", target=control + 1, control=control))
    return tuple(gates)


def build_hea(q: int, d: int) -> AnsatzCircuit:
    """Fully chained hardware-efficient circuit on q qubits, d layers."""
    if q < 1 or d < 1:
        raise ValueError("need q >= 1 and d >= 1")
    return AnsatzCircuit(
        n_qubits=q,
        gates=_layered(q, d, skip_cnot_control=None),
        param_count=3 * q * d,
        layers=d,
        kind="hea",
    )


def build_pcqnn(n: int, k: int, d: int) -> AnsatzCircuit:
    """Partitioned circuit: unit block of n qubits, slack block of k.

    Identical to build_hea(n + k, d) minus the chain CNOT between qubit
    n-1 and qubit n in every layer.
    """
    if n < 1 or k < 1 or d < 1:
        raise ValueError("need n >= 1, k >= 1 and d >= 1")
    q = n + k
    return AnsatzCircuit(
        n_qubits=q,
        gates=_layered(q, d, skip_cnot_control=n - 1),
        param_count=3 * q * d,
        layers=d,
        kind="pcqnn",
        partition=(n, k),
    )


@dataclass(frozen=True)
class BoundCircuit:
    """A circuit with parameter slots resolved to angles."""

    circuit: AnsatzCircuit
    params: np.ndarray

    def angle(self, gate: Gate) -> float:
        return float(self.params[gate.param_slot])


def bind(circuit: AnsatzCircuit, params) -> BoundCircuit:
    """Attach a parameter vector; length must equal param_count."""
    values = np.asarray(params, dtype=np.float64)
    if values.shape != (circuit.param_count,):
        raise ValueError(
            f"expected {circuit.param_count} parameters, got shape {values.shape}"
        )
    return BoundCircuit(circuit=circuit, params=values.copy())


def draw(circuit: AnsatzCircuit) -> str:
    """ASCII sketch, one line per qubit, gates in program order."""
    columns: list[list[str]] = []
    for gate in circuit.gates:
        col = ["-------"] * circuit.n_qubits
        if gate.is_rotation:
            col[gate.target] = f"R{gate.axis.upper()}({gate.param_slot:>2})"
        else:
            col[gate.control] = "---o---"
            col[gate.target] = "---X---"
        columns.append(col)
    lines = []
    for qubit in range(circuit.n_qubits):
        row = "".join(col[qubit] for col in columns)
        lines.append(f"q{qubit:<2}|0>-{row}")
    return "\n".join(lines)
