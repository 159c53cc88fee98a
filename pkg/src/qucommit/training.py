"""Minimization of circuit-expectation energies over rotation angles.

The public `gradient` evaluates the two-point shift rule
(E(theta + pi/2) - E(theta - pi/2)) / 2 per parameter, which is exact for
exp(-i*theta*sigma/2) rotations. The training loop evaluates the same
quantity by back-propagating the diagonal observable through the circuit
(one forward pass plus one reverse sweep instead of 2*P circuit runs);
both paths agree to machine precision and the test suite pins that.

Restarts are independent: each draws its own start point from a child of
the master seed, so results are reproducible bit for bit and restarts
could be farmed out without changing outcomes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ._batch import batched_energy_gradient
from .ansatz import AnsatzCircuit, BoundCircuit, bind, build_hea, build_pcqnn
from .encoding import IsingModel, encode
from .errors import ValidationError
from .model import UCInstance
from .oracle import exact_uc
from .simulator import StateVector, run_circuit, run_partitioned, sample, simulate, expectation

__all__ = [
    "TrainConfig",
    "TrainResult",
    "DepthScanEntry",
    "DepthScanReport",
    "objective",
    "gradient",
    "train",
    "depth_scan",
]


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer and readout settings; defaults suit the bundled fleets."""

    max_iters: int = 500
    learning_rate: float = 0.05
    restarts: int = 10
    shots: int = 1000
    seed: int = 0
    grad_tol: float = 1e-4
    plateau_window: int = 25
    plateau_tol: float = 1e-9
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self) -> None:
        if self.max_iters < 1:
            raise ValidationError("max_iters must be >= 1")
        if self.restarts < 1:
            raise ValidationError("restarts must be >= 1")
        if self.shots < 1:
            raise ValidationError("shots must be >= 1")
        if self.learning_rate <= 0:
            raise ValidationError("learning_rate must be > 0")


@dataclass(frozen=True)
class TrainResult:
    """Winning restart: optimized angles plus the sampled readout."""

    theta_star: np.ndarray
    best_bitstring: str
    probability: float
    energy: float
    energy_trace: tuple[float, ...]
    restart_index: int
    iterations: int


def objective(circuit: AnsatzCircuit, params, model: IsingModel) -> float:
    """Exact (noiseless) expectation of the model over the circuit output.

    Partitioned circuits are evaluated block by block automatically.
    """
    return expectation(simulate(bind(circuit, params)), model)


def gradient(circuit: AnsatzCircuit, params, model: IsingModel) -> np.ndarray:
    """Parameter-shift gradient: one +/- pi/2 evaluation pair per slot."""
    params = np.asarray(params, dtype=np.float64)
    grad = np.empty(circuit.param_count)
    for slot in range(circuit.param_count):
        shifted = params.copy()
        shifted[slot] = params[slot] + np.pi / 2
        e_plus = objective(circuit, shifted, model)
        shifted[slot] = params[slot] - np.pi / 2
        e_minus = objective(circuit, shifted, model)
        grad[slot] = 0.5 * (e_plus - e_minus)
    return grad


# --- fast exact gradient (reverse sweep) -----------------------------------

_Op = tuple[str, int, int, int, float]  # kind, target, control, slot, angle


def _local_ops(bound: BoundCircuit, owner: list[int] | None, block: int, start: int) -> list[_Op]:
    ops = []
    for gate in bound.circuit.gates:
        if owner is not None and owner[gate.target] != block:
            continue
        control = -1 if gate.control is None else gate.control - start
        slot = -1 if gate.param_slot is None else gate.param_slot
        angle = 0.0 if gate.param_slot is None else bound.angle(gate)
        ops.append((gate.kind, gate.target - start, control, slot, angle))
    return ops


def _sigma_overlap(bra: StateVector, ket: StateVector, target: int, axis: str) -> complex:
    b = bra.amps.reshape(-1, 2, 1 << target)
    k = ket.amps.reshape(-1, 2, 1 << target)
    if axis == "x":
        return np.vdot(b[:, 0, :], k[:, 1, :]) + np.vdot(b[:, 1, :], k[:, 0, :])
    if axis == "y":
        return -1j * np.vdot(b[:, 0, :], k[:, 1, :]) + 1j * np.vdot(b[:, 1, :], k[:, 0, :])
    return np.vdot(b[:, 0, :], k[:, 0, :]) - np.vdot(b[:, 1, :], k[:, 1, :])


def _reverse_sweep(psi: StateVector, table: np.ndarray, ops: list[_Op], grad: np.ndarray) -> None:
    """Accumulate d<table>/d(theta) into grad, consuming psi."""
    ket = psi
    bra = StateVector(psi.q, table * psi.amps)
    for kind, target, control, slot, angle in reversed(ops):
        if kind == "cnot":
            ket.apply_cnot(control, target)
            bra.apply_cnot(control, target)
        else:
            axis = kind[1]
            grad[slot] += _sigma_overlap(bra, ket, target, axis).imag
            ket.apply_rotation(target, axis, -angle)
            bra.apply_rotation(target, axis, -angle)


def _energy_and_gradient(
    circuit: AnsatzCircuit, params: np.ndarray, model: IsingModel
) -> tuple[float, np.ndarray]:
    """Objective value and its exact gradient in one forward/backward pass."""
    bound = bind(circuit, params)
    grad = np.zeros(circuit.param_count)
    if circuit.partition is None:
        psi = run_circuit(bound)
        energy = float(psi.probabilities() @ model.energy_table)
        _reverse_sweep(psi, model.energy_table, _local_ops(bound, None, 0, 0), grad)
        return energy, grad

    state = run_partitioned(bound)
    split = model.split(circuit.partition)
    probs = [block.probabilities() for block in state.blocks]
    mean_z = {}
    for c in split.cross:
        for b, t in ((c[0], c[1]), (c[2], c[3])):
            if (b, t) not in mean_z:
                bits = (np.arange(1 << state.blocks[b].q) >> t) & 1
                mean_z[(b, t)] = float(probs[b] @ (1.0 - 2.0 * bits))
    energy = split.offset
    for p, table in zip(probs, split.block_tables):
        energy += float(p @ table)
    for bi, ti, bj, tj, coeff in split.cross:
        energy += coeff * mean_z[(bi, ti)] * mean_z[(bj, tj)]

    # Per block, the rest of the system only enters through fixed means, so
    # the block gradient is the gradient of an effective diagonal observable.
    owner = []
    for b, size in enumerate(circuit.partition):
        owner.extend([b] * size)
    start = 0
    for b, size in enumerate(circuit.partition):
        eff = split.block_tables[b].copy()
        local = np.arange(1 << size)
        for bi, ti, bj, tj, coeff in split.cross:
            if bi == b:
                eff += coeff * mean_z[(bj, tj)] * (1.0 - 2.0 * ((local >> ti) & 1))
            elif bj == b:
                eff += coeff * mean_z[(bi, ti)] * (1.0 - 2.0 * ((local >> tj) & 1))
        _reverse_sweep(state.blocks[b], eff, _local_ops(bound, owner, b, start), grad)
        start += size
    return energy, grad


# --- optimization loop ------------------------------------------------------


@dataclass
class _Restart:
    theta: np.ndarray
    energy: float = math.inf
    trace: list[float] = field(default_factory=list)
    grad_norms: list[float] = field(default_factory=list)


def _minimize_bundle(
    circuit: AnsatzCircuit, model: IsingModel, theta0: np.ndarray, cfg: TrainConfig
) -> list[_Restart]:
    """Advance all restarts in lockstep; each is an independent Adam run.

    A restart freezes once its own stopping rule fires; the loop ends when
    all are frozen or max_iters is reached.
    """
    rows = theta0.shape[0]
    thetas = theta0.copy()
    restarts = [_Restart(theta=theta0[r].copy()) for r in range(rows)]
    m = np.zeros_like(thetas)
    v = np.zeros_like(thetas)
    active = np.ones(rows, dtype=bool)
    for t in range(1, cfg.max_iters + 1):
        energy, grad = batched_energy_gradient(circuit, thetas, model)
        norms = np.linalg.norm(grad, axis=1)
        for r in np.flatnonzero(active):
            state = restarts[r]
            state.trace.append(float(energy[r]))
            state.grad_norms.append(float(norms[r]))
            if energy[r] < state.energy:
                state.energy = float(energy[r])
                state.theta = thetas[r].copy()
            window = state.trace[-cfg.plateau_window :]
            if norms[r] < cfg.grad_tol or (
                len(window) == cfg.plateau_window
                and max(window) - min(window) < cfg.plateau_tol
            ):
                active[r] = False
        if not active.any():
            break
        m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * grad
        v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * grad * grad
        step = (
            cfg.learning_rate
            * (m / (1.0 - cfg.adam_beta1**t))
            / (np.sqrt(v / (1.0 - cfg.adam_beta2**t)) + cfg.adam_eps)
        )
        thetas[active] -= step[active]
    return restarts


def train(
    circuit: AnsatzCircuit,
    model: IsingModel,
    config: TrainConfig | None = None,
    trace_path: str | Path | None = None,
) -> TrainResult:
    """Run seeded restarts, keep the lowest-energy one, sample its state.

    The reported bitstring is the most frequent readout outcome (ties go to
    the lexicographically smallest string) and `probability` its empirical
    frequency. Non-convergence is a reported outcome, never an error.
    """
    cfg = config or TrainConfig()
    if circuit.n_qubits != model.n_vars:
        raise ValueError(
            f"circuit has {circuit.n_qubits} qubits, model has {model.n_vars} spins"
        )
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts + 1)
    theta0 = np.vstack(
        [
            np.random.default_rng(seeds[r]).uniform(-np.pi, np.pi, circuit.param_count)
            for r in range(cfg.restarts)
        ]
    )
    restarts = _minimize_bundle(circuit, model, theta0, cfg)
    winner_index = min(range(cfg.restarts), key=lambda r: restarts[r].energy)
    winner = restarts[winner_index]
    if trace_path is not None:
        lines = [
            f"{i} {e!r} {g!r}\n"
            for i, (e, g) in enumerate(zip(winner.trace, winner.grad_norms), start=1)
        ]
        Path(trace_path).write_text("".join(lines))
    final_state = simulate(bind(circuit, winner.theta))
    counts = sample(final_state, cfg.shots, np.random.default_rng(seeds[cfg.restarts]))
    bitstring = min(counts, key=lambda s: (-counts[s], s))
    return TrainResult(
        theta_star=winner.theta,
        best_bitstring=bitstring,
        probability=counts[bitstring] / cfg.shots,
        energy=winner.energy,
        energy_trace=tuple(winner.trace),
        restart_index=winner_index,
        iterations=len(winner.trace),
    )


# --- depth scanning ----------------------------------------------------------


@dataclass(frozen=True)
class DepthScanEntry:
    depth: int
    bitstring: str
    unit_bitstring: str
    probability: float
    energy: float
    success: bool


@dataclass(frozen=True)
class DepthScanReport:
    ansatz: str
    oracle_bitstring: str
    entries: tuple[DepthScanEntry, ...]

    @property
    def minimal_depth(self) -> int | None:
        for entry in self.entries:
            if entry.success:
                return entry.depth
        return None

    def best_entry(self) -> DepthScanEntry:
        """Entry at the minimal successful depth, else the lowest-energy one."""
        for entry in self.entries:
            if entry.success:
                return entry
        return min(self.entries, key=lambda e: e.energy)


def build_ansatz(instance: UCInstance, kind: str, depth: int) -> AnsatzCircuit:
    """Instance-shaped circuit of the requested family."""
    if kind == "hea":
        return build_hea(instance.n_vars, depth)
    if kind == "pcqnn":
        if not instance.double_constraint:
            raise ValidationError("pcqnn needs a spare-constrained instance (slack block)")
        return build_pcqnn(instance.n, instance.slack_bits, depth)
    raise ValidationError(f"unknown ansatz kind {kind!r}")


def depth_scan(
    instance: UCInstance,
    kind: str,
    d_range: Iterable[int] | Sequence[int],
    config: TrainConfig | None = None,
) -> DepthScanReport:
    """Train at each depth and record agreement with the exact optimum.

    Success means the unit part of the readout bitstring matches the
    constrained brute-force optimum.
    """
    depths = sorted(set(int(d) for d in d_range))
    if not depths:
        raise ValidationError("depth range is empty")
    oracle = exact_uc(instance)
    if not oracle.feasible:
        raise ValidationError("instance has no feasible subset; nothing to scan against")
    model = encode(instance)
    entries = []
    for depth in depths:
        circuit = build_ansatz(instance, kind, depth)
        result = train(circuit, model, config)
        unit_part = result.best_bitstring[: instance.n]
        entries.append(
            DepthScanEntry(
                depth=depth,
                bitstring=result.best_bitstring,
                unit_bitstring=unit_part,
                probability=result.probability,
                energy=result.energy,
                success=unit_part == oracle.best_assignment,
            )
        )
    return DepthScanReport(ansatz=kind, oracle_bitstring=oracle.best_assignment, entries=tuple(entries))
