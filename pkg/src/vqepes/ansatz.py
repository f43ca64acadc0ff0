"""Trial-state construction: UCCSD, hardware-efficient RyRz, ADAPT pool.

A ParameterizedCircuit is an ordered list of three element kinds:

* ``PauliRotation(p, k, scale)``  -- exp(-i (scale * theta_k) / 2 * P)
* ``ParamGate(kind, qubit, k)``   -- Ry/Rz rotation by theta_k
* ``FixedGate(kind, qubits)``     -- CNOT or X

UCCSD excitations share one parameter across all Pauli strings of the
same excitation (the JW coefficients go into the rotation scales); ADAPT
appends pool strings with one fresh parameter each.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fermion import FermionOperator, hf_reference, jordan_wigner
from .pauli import PauliString
from .simulator import StateVector, apply_gate, apply_pauli_rotation


@dataclass(frozen=True)
class PauliRotation:
    pauli: PauliString
    param_index: int
    scale: float = 1.0


@dataclass(frozen=True)
class ParamGate:
    kind: str  # RY | RZ
    qubit: int
    param_index: int


@dataclass(frozen=True)
class FixedGate:
    kind: str  # CNOT | X
    qubits: tuple[int, ...]


CircuitElement = PauliRotation | ParamGate | FixedGate


@dataclass
class ParameterizedCircuit:
    n_qubits: int
    elements: list[CircuitElement] = field(default_factory=list)
    n_params: int = 0

    def validate(self) -> None:
        seen = set()
        for el in self.elements:
            if isinstance(el, PauliRotation):
                if el.pauli.n_qubits != self.n_qubits:
                    raise ValueError("rotation qubit count mismatch")
                seen.add(el.param_index)
            elif isinstance(el, ParamGate):
                if not 0 <= el.qubit < self.n_qubits:
                    raise ValueError("gate qubit out of range")
                seen.add(el.param_index)
            else:
                for q in el.qubits:
                    if not 0 <= q < self.n_qubits:
                        raise ValueError("gate qubit out of range")
        if seen != set(range(self.n_params)):
            raise ValueError("parameter indices are not contiguous 0..n_params-1")

    def apply_to(
        self,
        state: StateVector,
        params: np.ndarray,
        angle_override: dict[int, float] | None = None,
    ) -> None:
        """Apply in order; ``angle_override`` adds an extra angle to one
        element occurrence (keyed by element position), which is what the
        per-occurrence parameter-shift rule needs."""
        params = np.asarray(params, dtype=float)
        if params.shape != (self.n_params,):
            raise ValueError(f"expected {self.n_params} parameters, got {params.shape}")
        for pos, el in enumerate(self.elements):
            extra = angle_override.get(pos, 0.0) if angle_override else 0.0
            if isinstance(el, PauliRotation):
                apply_pauli_rotation(state, el.pauli, el.scale * params[el.param_index] + extra)
            elif isinstance(el, ParamGate):
                apply_gate(state, el.kind, el.qubit, theta=params[el.param_index] + extra)
            else:
                apply_gate(state, el.kind, el.qubits)

    def serialize(self) -> str:
        lines = [f"QUBITS {self.n_qubits}", f"PARAMS {self.n_params}"]
        for el in self.elements:
            if isinstance(el, PauliRotation):
                lines.append(f"ROT {el.scale!r} {el.pauli.sparse_label()} p{el.param_index}")
            elif isinstance(el, ParamGate):
                lines.append(f"{el.kind} {el.qubit} p{el.param_index}")
            else:
                lines.append(f"{el.kind} " + " ".join(str(q) for q in el.qubits))
        return "\n".join(lines) + "\n"

    @classmethod
    def deserialize(cls, text: str) -> "ParameterizedCircuit":
        lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
        if len(lines) < 2 or not lines[0].startswith("QUBITS") or not lines[1].startswith("PARAMS"):
            raise ValueError("circuit text must start with QUBITS and PARAMS lines")
        n_qubits = int(lines[0].split()[1])
        n_params = int(lines[1].split()[1])
        out = cls(n_qubits, [], n_params)
        for ln in lines[2:]:
            parts = ln.split()
            if parts[0] == "ROT":
                out.elements.append(
                    PauliRotation(
                        _parse_sparse_label(parts[2], n_qubits),
                        int(parts[3][1:]),
                        float(parts[1]),
                    )
                )
            elif parts[0] in ("RY", "RZ"):
                out.elements.append(ParamGate(parts[0], int(parts[1]), int(parts[2][1:])))
            elif parts[0] in ("CNOT", "X"):
                out.elements.append(FixedGate(parts[0], tuple(int(q) for q in parts[1:])))
            else:
                raise ValueError(f"unknown circuit line {ln!r}")
        out.validate()
        return out


def _parse_sparse_label(label: str, n_qubits: int) -> PauliString:
    if label == "I":
        return PauliString.identity(n_qubits)
    letters: dict[int, str] = {}
    i = 0
    while i < len(label):
        ch = label[i]
        if ch not in "XYZ":
            raise ValueError(f"bad sparse Pauli label {label!r}")
        j = i + 1
        while j < len(label) and label[j].isdigit():
            j += 1
        letters[int(label[i + 1 : j])] = ch
        i = j
    return PauliString.from_sparse(n_qubits, letters)


@dataclass
class Excitation:
    """Antisymmetrized generator T - T^dagger with a provenance label."""

    label: str
    generator: FermionOperator


@dataclass
class OperatorPool:
    ops: list[PauliString]
    provenance: list[str]

    def __len__(self) -> int:
        return len(self.ops)


def _occupied_virtual(n_active_elec: int, n_spin_orb: int) -> tuple[list[int], list[int]]:
    mask = hf_reference(n_active_elec, n_spin_orb)
    occupied = [i for i in range(n_spin_orb) if mask & (1 << i)]
    virtual = [i for i in range(n_spin_orb) if not mask & (1 << i)]
    return occupied, virtual


def _spin(index: int, n_spatial: int) -> int:
    return 0 if index < n_spatial else 1


def uccsd_excitations(n_active_elec: int, n_spin_orb: int) -> list[Excitation]:
    """All spin-preserving singles and doubles from the HF reference.

    Each is returned antisymmetrized (T - T^dagger), singles first, in
    lexicographic (i, a) / (i, j, a, b) order.
    """
    occupied, virtual = _occupied_virtual(n_active_elec, n_spin_orb)
    n_spatial = n_spin_orb // 2
    out: list[Excitation] = []
    for i in occupied:
        for a in virtual:
            if _spin(i, n_spatial) != _spin(a, n_spatial):
                continue
            gen = FermionOperator(n_spin_orb)
            gen.add(((a, True), (i, False)), 1.0)
            gen.add(((i, True), (a, False)), -1.0)
            out.append(Excitation(f"s:{i}->{a}", gen))
    for ii, i in enumerate(occupied):
        for j in occupied[ii + 1 :]:
            for ai, a in enumerate(virtual):
                for b in virtual[ai + 1 :]:
                    spins_occ = sorted((_spin(i, n_spatial), _spin(j, n_spatial)))
                    spins_virt = sorted((_spin(a, n_spatial), _spin(b, n_spatial)))
                    if spins_occ != spins_virt:
                        continue
                    gen = FermionOperator(n_spin_orb)
                    gen.add(((a, True), (b, True), (j, False), (i, False)), 1.0)
                    gen.add(((i, True), (j, True), (b, False), (a, False)), -1.0)
                    out.append(Excitation(f"d:{i},{j}->{a},{b}", gen))
    return out


def uccsd_circuit(excitations: list[Excitation], n_spin_orb: int | None = None) -> ParameterizedCircuit:
    """First-order Trotter circuit, one shared parameter per excitation.

    JW maps T - T^dagger to a sum of purely imaginary coefficients i*c_m;
    exp(theta (T - T^dagger)) trotterizes into rotations with scale -2 c_m,
    ordered canonically within each excitation.
    """
    if not excitations:
        if n_spin_orb is None:
            raise ValueError("empty excitation list needs an explicit qubit count")
        return ParameterizedCircuit(n_spin_orb, [], 0)
    n = excitations[0].generator.n_spin_orb
    circuit = ParameterizedCircuit(n, [], len(excitations))
    for k, exc in enumerate(excitations):
        mapped = jordan_wigner(exc.generator)
        for p, coeff in mapped.terms.items():
            c = complex(coeff)
            if abs(c.real) > 1e-12:
                raise ValueError("excitation generator is not anti-Hermitian under JW")
            circuit.elements.append(PauliRotation(p, k, scale=-2.0 * c.imag))
    circuit.validate()
    return circuit


def ryrz_circuit(n_qubits: int, reps: int, entanglement: str = "chain") -> ParameterizedCircuit:
    """Hardware-efficient ansatz: per rep an Ry and an Rz layer on every
    qubit followed by a CNOT entangler, plus one final Ry+Rz layer."""
    if reps < 0:
        raise ValueError("reps must be non-negative")
    circuit = ParameterizedCircuit(n_qubits, [], 2 * n_qubits * (reps + 1))
    k = 0
    for layer in range(reps + 1):
        for q in range(n_qubits):
            circuit.elements.append(ParamGate("RY", q, k))
            k += 1
        for q in range(n_qubits):
            circuit.elements.append(ParamGate("RZ", q, k))
            k += 1
        if layer < reps:
            if entanglement == "chain":
                pairs = [(q, q + 1) for q in range(n_qubits - 1)]
            elif entanglement == "full":
                pairs = [(a, b) for a in range(n_qubits) for b in range(a + 1, n_qubits)]
            else:
                raise ValueError(f"unknown entanglement {entanglement!r}")
            for pair in pairs:
                circuit.elements.append(FixedGate("CNOT", pair))
    circuit.validate()
    return circuit


def build_pool(excitations: list[Excitation]) -> OperatorPool:
    """qubit-ADAPT operator pool: the distinct odd-Y Pauli strings of the
    JW-mapped UCCSD generators, coefficients dropped, first-seen order."""
    ops: list[PauliString] = []
    provenance: list[str] = []
    seen: set[PauliString] = set()
    for exc in excitations:
        mapped = jordan_wigner(exc.generator)
        for p in mapped.terms:
            if p.y_parity() != "odd":
                continue
            if p in seen:
                continue
            seen.add(p)
            ops.append(p)
            provenance.append(exc.label)
    if not ops:
        raise ValueError("operator pool is empty: trivial active space")
    return OperatorPool(ops, provenance)
