"""Decomposition into the {CNOT, Rz, Sx, X} basis with count/depth reports.

A weight-w Pauli rotation becomes per-qubit basis changes into Z, a CNOT
ladder onto the highest-index active qubit (2(w-1) CNOTs), one central
Rz, and the mirror image.  The only clean-ups applied are zero-angle
elision and adjacent-inverse CNOT cancellation (two identical CNOTs with
no gate touching either wire in between), so counts stay deterministic
and explainable.  All-to-all connectivity is assumed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ansatz import FixedGate, ParamGate, ParameterizedCircuit, PauliRotation
from .simulator import StateVector, apply_gate

_ZERO_ANGLE = 1e-12

# application-order gate patterns for the basis changes
_H_PATTERN = (("RZ", np.pi / 2), ("SX", None), ("RZ", np.pi / 2))          # X -> Z
_Y_IN_PATTERN = (("SX", None),)                                            # Y -> Z
_Y_OUT_PATTERN = (("RZ", np.pi), ("SX", None), ("RZ", np.pi))              # inverse of Sx up to phase


@dataclass(frozen=True)
class BasisOp:
    gate: str                  # CNOT | RZ | SX | X
    qubits: tuple[int, ...]
    angle: float | None = None


@dataclass
class BasisCircuit:
    n_qubits: int
    ops: list[BasisOp] = field(default_factory=list)

    @property
    def counts(self) -> dict[str, int]:
        out = {"CNOT": 0, "RZ": 0, "SX": 0, "X": 0}
        for op in self.ops:
            out[op.gate] += 1
        return out

    @property
    def depth(self) -> int:
        frontier = [0] * self.n_qubits
        for op in self.ops:
            level = 1 + max(frontier[q] for q in op.qubits)
            for q in op.qubits:
                frontier[q] = level
        return max(frontier, default=0)

    def depth_by_dag(self) -> int:
        """Longest path over the shared-qubit dependency DAG (cross-check)."""
        last: dict[int, int] = {}
        dist = [0] * len(self.ops)
        best = 0
        for i, op in enumerate(self.ops):
            pred = [dist[last[q]] for q in op.qubits if q in last]
            dist[i] = 1 + max(pred, default=0)
            for q in op.qubits:
                last[q] = i
            best = max(best, dist[i])
        return best

    def count_table(self) -> str:
        rows = [f"{gate} {count}" for gate, count in self.counts.items()]
        rows.append(f"depth {self.depth}")
        return "\n".join(rows) + "\n"


class _Builder:
    """Accumulates ops, cancelling adjacent-inverse CNOT pairs on the fly."""

    def __init__(self, n_qubits: int):
        self.n_qubits = n_qubits
        self.ops: list[BasisOp | None] = []
        self.last_touch: dict[int, int] = {}

    def add(self, gate: str, qubits: tuple[int, ...], angle: float | None = None) -> None:
        if gate in ("RZ",) and angle is not None and abs(angle) < _ZERO_ANGLE:
            return
        if gate == "CNOT":
            pc = self.last_touch.get(qubits[0])
            pt = self.last_touch.get(qubits[1])
            if pc is not None and pc == pt:
                prev = self.ops[pc]
                if prev is not None and prev.gate == "CNOT" and prev.qubits == qubits:
                    self.ops[pc] = None
                    self._rescan(qubits)
                    return
        index = len(self.ops)
        self.ops.append(BasisOp(gate, qubits, angle))
        for q in qubits:
            self.last_touch[q] = index

    def _rescan(self, qubits: tuple[int, ...]) -> None:
        for q in qubits:
            self.last_touch.pop(q, None)
        for i in range(len(self.ops) - 1, -1, -1):
            op = self.ops[i]
            if op is None:
                continue
            for q in op.qubits:
                if q in qubits and q not in self.last_touch:
                    self.last_touch[q] = i
            if all(q in self.last_touch for q in qubits):
                break

    def finish(self) -> list[BasisOp]:
        return [op for op in self.ops if op is not None]


def _emit_pauli_rotation(builder: _Builder, pauli, angle: float) -> None:
    if abs(angle) < _ZERO_ANGLE or pauli.is_identity:
        return
    support = pauli.support()
    target = support[-1]
    x_qubits = []
    y_qubits = []
    for q in support:
        bit = 1 << q
        has_x, has_z = bool(pauli.x_mask & bit), bool(pauli.z_mask & bit)
        if has_x and has_z:
            y_qubits.append(q)
        elif has_x:
            x_qubits.append(q)
    for q in x_qubits:
        for gate, a in _H_PATTERN:
            builder.add(gate, (q,), a)
    for q in y_qubits:
        for gate, a in _Y_IN_PATTERN:
            builder.add(gate, (q,), a)
    for a, b in zip(support, support[1:]):
        builder.add("CNOT", (a, b))
    builder.add("RZ", (target,), angle)
    for a, b in reversed(list(zip(support, support[1:]))):
        builder.add("CNOT", (a, b))
    for q in y_qubits:
        for gate, a in _Y_OUT_PATTERN:
            builder.add(gate, (q,), a)
    for q in x_qubits:
        for gate, a in _H_PATTERN:
            builder.add(gate, (q,), a)


def _emit_ry(builder: _Builder, qubit: int, theta: float) -> None:
    if abs(theta) < _ZERO_ANGLE:
        return
    # fixed Sx/Rz pattern, unitary-equal to Ry(theta) up to global phase
    builder.add("RZ", (qubit,), 0.0)
    builder.add("SX", (qubit,))
    builder.add("RZ", (qubit,), theta + np.pi)
    builder.add("SX", (qubit,))
    builder.add("RZ", (qubit,), 3.0 * np.pi)


def decompose(circuit: ParameterizedCircuit, params) -> BasisCircuit:
    """Bind parameters and lower every element to {CNOT, Rz, Sx, X}."""
    params = np.asarray(params, dtype=float)
    if params.shape != (circuit.n_params,):
        raise ValueError("parameter vector has wrong length")
    builder = _Builder(circuit.n_qubits)
    for el in circuit.elements:
        if isinstance(el, PauliRotation):
            _emit_pauli_rotation(builder, el.pauli, el.scale * params[el.param_index])
        elif isinstance(el, ParamGate):
            theta = float(params[el.param_index])
            if el.kind == "RZ":
                builder.add("RZ", (el.qubit,), theta)
            elif el.kind == "RY":
                _emit_ry(builder, el.qubit, theta)
            else:
                raise ValueError(f"unsupported parameterized gate {el.kind!r}")
        elif isinstance(el, FixedGate):
            if el.kind == "CNOT":
                builder.add("CNOT", tuple(el.qubits))
            elif el.kind == "X":
                builder.add("X", tuple(el.qubits))
            else:
                raise ValueError(f"unsupported gate {el.kind!r}")
        else:
            raise ValueError(f"unsupported circuit element {el!r}")
    return BasisCircuit(circuit.n_qubits, builder.finish())


def _unitary_of_basis(circuit: BasisCircuit) -> np.ndarray:
    dim = 1 << circuit.n_qubits
    cols = []
    for k in range(dim):
        state = StateVector(circuit.n_qubits)
        state.amplitudes[0] = 0.0
        state.amplitudes[k] = 1.0
        for op in circuit.ops:
            apply_gate(state, op.gate, op.qubits if len(op.qubits) > 1 else op.qubits[0],
                       theta=op.angle)
        cols.append(state.amplitudes)
    return np.column_stack(cols)


def _unitary_of_circuit(circuit: ParameterizedCircuit, params) -> np.ndarray:
    dim = 1 << circuit.n_qubits
    cols = []
    for k in range(dim):
        state = StateVector(circuit.n_qubits)
        state.amplitudes[0] = 0.0
        state.amplitudes[k] = 1.0
        circuit.apply_to(state, params)
        cols.append(state.amplitudes)
    return np.column_stack(cols)


def verify_decomposition(circuit: ParameterizedCircuit, params, tol: float = 1e-10) -> bool:
    """Dense unitary equivalence up to global phase (small registers only)."""
    if circuit.n_qubits > 8:
        raise ValueError("verification limited to 8 qubits")
    u_ref = _unitary_of_circuit(circuit, np.asarray(params, dtype=float))
    u_dec = _unitary_of_basis(decompose(circuit, params))
    overlap = np.trace(u_ref.conj().T @ u_dec) / u_ref.shape[0]
    if abs(overlap) < 1e-12:
        return False
    phase = overlap / abs(overlap)
    return bool(np.max(np.abs(u_dec - phase * u_ref)) < tol)
