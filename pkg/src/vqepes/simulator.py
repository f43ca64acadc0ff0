"""Dense statevector simulation with shot sampling and readout mitigation.

Basis indexing is little-endian: qubit 0 is the least significant bit of
the basis index, so bit tricks work directly on index arrays.  Pauli
rotations act on the amplitudes in one vectorized pass instead of being
decomposed into gates; the decomposed form exists only in ``resources``
for counting.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .pauli import PauliString, QubitOperator

_INV_SQRT2 = 1.0 / np.sqrt(2.0)
_H = np.array([[_INV_SQRT2, _INV_SQRT2], [_INV_SQRT2, -_INV_SQRT2]], dtype=complex)
_SX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)

# CSR materialization cap: n_groups * dim complex entries
_CSR_NNZ_LIMIT = 1 << 24


class StateVector:
    """2^n complex amplitudes; single-owner mutable."""

    def __init__(self, n_qubits: int, amplitudes: np.ndarray | None = None):
        self.n_qubits = n_qubits
        dim = 1 << n_qubits
        if amplitudes is None:
            amplitudes = np.zeros(dim, dtype=complex)
            amplitudes[0] = 1.0
        else:
            amplitudes = np.asarray(amplitudes, dtype=complex)
            if amplitudes.shape != (dim,):
                raise ValueError("amplitude vector has wrong length")
        self.amplitudes = amplitudes

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def fidelity(self, other: "StateVector") -> float:
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)


@dataclass
class ReadoutNoiseModel:
    """Per-qubit assignment errors: p01 = P(read 1 | true 0), p10 = P(read 0 | true 1)."""

    p01: np.ndarray
    p10: np.ndarray

    def __post_init__(self):
        self.p01 = np.atleast_1d(np.asarray(self.p01, dtype=float))
        self.p10 = np.atleast_1d(np.asarray(self.p10, dtype=float))
        for arr in (self.p01, self.p10):
            if np.any(arr < 0.0) or np.any(arr > 0.5):
                raise ValueError("readout error probabilities must lie in [0, 0.5]")

    @classmethod
    def uniform(cls, n_qubits: int, p01: float, p10: float) -> "ReadoutNoiseModel":
        return cls(np.full(n_qubits, p01), np.full(n_qubits, p10))


@dataclass
class ShotResult:
    basis: PauliString
    shots: int
    counts: dict[str, int]
    seed: int


def prepare_reference(occupation_mask: int, n_qubits: int) -> StateVector:
    """Computational-basis state with the given occupation bit-pattern."""
    if occupation_mask >= (1 << n_qubits):
        raise ValueError("occupation pattern does not fit in the register")
    state = StateVector(n_qubits)
    state.amplitudes[0] = 0.0
    state.amplitudes[occupation_mask] = 1.0
    return state


def _pauli_action(p: PauliString):
    """Return (x_mask, phase_fn) with P|i> = phase(i) |i ^ x_mask>."""
    y = p.y_count()
    y_phase = (1j) ** y
    z_mask = p.z_mask

    def phase(indices: np.ndarray) -> np.ndarray:
        signs = 1.0 - 2.0 * (np.bitwise_count(indices & z_mask) & 1)
        return y_phase * signs

    return p.x_mask, phase


def apply_pauli_string(state: StateVector, p: PauliString) -> None:
    """In-place |psi> <- P|psi>."""
    idx = np.arange(state.amplitudes.size, dtype=np.int64)
    x_mask, phase = _pauli_action(p)
    src = idx ^ x_mask
    state.amplitudes = phase(src) * state.amplitudes[src]


def apply_pauli_rotation(state: StateVector, p: PauliString, theta: float) -> None:
    """In-place |psi> <- exp(-i theta/2 P)|psi> = cos(t/2)|psi> - i sin(t/2) P|psi>."""
    if p.n_qubits != state.n_qubits:
        raise ValueError("qubit-count mismatch")
    c = np.cos(0.5 * theta)
    s = np.sin(0.5 * theta)
    amps = state.amplitudes
    if p.is_identity:
        amps *= c - 1j * s
        return
    idx = np.arange(amps.size, dtype=np.int64)
    x_mask, phase = _pauli_action(p)
    src = idx ^ x_mask
    state.amplitudes = c * amps - 1j * s * (phase(src) * amps[src])


def _apply_single_qubit(state: StateVector, qubit: int, u: np.ndarray) -> None:
    n = state.n_qubits
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} out of range")
    view = state.amplitudes.reshape(1 << (n - qubit - 1), 2, 1 << qubit)
    state.amplitudes = np.einsum("ab,xby->xay", u, view).reshape(-1)


def _apply_cnot(state: StateVector, control: int, target: int) -> None:
    if control == target:
        raise ValueError("CNOT control and target must differ")
    amps = state.amplitudes
    idx = np.arange(amps.size, dtype=np.int64)
    sel = (idx >> control) & 1 == 1
    flipped = idx[sel] ^ (1 << target)
    out = amps.copy()
    out[idx[sel]] = amps[flipped]
    state.amplitudes = out


def apply_gate(state: StateVector, gate: str, qubits, theta: float | None = None) -> None:
    """Apply a named gate from the {X, Sx, Rz, Ry, CNOT} set."""
    if isinstance(qubits, int):
        qubits = (qubits,)
    kind = gate.upper()
    if kind == "X":
        _apply_single_qubit(state, qubits[0], _X)
    elif kind == "SX":
        _apply_single_qubit(state, qubits[0], _SX)
    elif kind == "RZ":
        u = np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]])
        _apply_single_qubit(state, qubits[0], u)
    elif kind == "RY":
        c, s = np.cos(0.5 * theta), np.sin(0.5 * theta)
        _apply_single_qubit(state, qubits[0], np.array([[c, -s], [s, c]], dtype=complex))
    elif kind == "CNOT":
        _apply_cnot(state, qubits[0], qubits[1])
    else:
        raise ValueError(f"unsupported gate {gate!r}")


class CompiledOperator:
    """A QubitOperator pre-grouped for fast repeated expectation/matvec.

    Terms sharing an x-mask contribute to the same off-diagonal stripe of
    the matrix; for small registers the whole operator is materialized as
    a CSR matrix once and reused.
    """

    def __init__(self, op: QubitOperator):
        op = op.simplify()
        self.source = op
        self.n_qubits = op.n_qubits
        self.dim = 1 << op.n_qubits
        groups: dict[int, list[tuple[int, complex]]] = {}
        for p, c in op.terms.items():
            c = complex(c)
            phase = (1j) ** p.y_count()
            groups.setdefault(p.x_mask, []).append((p.z_mask, c * phase))
        self.groups = groups
        self._matrix = None
        if self.dim * max(len(groups), 1) <= _CSR_NNZ_LIMIT:
            self._matrix = self._build_csr()

    def _group_weights(self, x_mask: int, idx: np.ndarray) -> np.ndarray:
        w = np.zeros(idx.size, dtype=complex)
        for z_mask, coeff in self.groups[x_mask]:
            w += coeff * (1.0 - 2.0 * (np.bitwise_count(idx & z_mask) & 1))
        return w

    def _build_csr(self) -> sp.csr_matrix:
        idx = np.arange(self.dim, dtype=np.int64)
        rows, cols, data = [], [], []
        for x_mask in self.groups:
            rows.append(idx ^ x_mask)
            cols.append(idx)
            data.append(self._group_weights(x_mask, idx))
        if not rows:
            return sp.csr_matrix((self.dim, self.dim), dtype=complex)
        return sp.csr_matrix(
            (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
            shape=(self.dim, self.dim),
        )

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        if self._matrix is not None:
            return self._matrix @ amplitudes
        idx = np.arange(self.dim, dtype=np.int64)
        out = np.zeros_like(amplitudes)
        for x_mask in self.groups:
            src = idx ^ x_mask
            out += self._group_weights(x_mask, src) * amplitudes[src]
        return out

    def expectation(self, amplitudes: np.ndarray) -> complex:
        return complex(np.vdot(amplitudes, self.apply(amplitudes)))


def compile_operator(op) -> CompiledOperator:
    return op if isinstance(op, CompiledOperator) else CompiledOperator(op)


def expectation(state: StateVector, op) -> float:
    """<psi|op|psi> for a Hermitian operator, in Hartree when op is H."""
    compiled = compile_operator(op)
    if not compiled.source.is_hermitian():
        raise ValueError("expectation requires a Hermitian operator")
    value = compiled.expectation(state.amplitudes)
    if abs(value.imag) > 1e-10:
        raise AssertionError(f"imaginary residue {value.imag:.3e} in Hermitian expectation")
    return float(value.real)


def _measurement_probabilities(state: StateVector, p: PauliString) -> np.ndarray:
    """Probabilities after rotating each support qubit of p into the Z basis."""
    rotated = state.copy()
    for q in range(p.n_qubits):
        bit = 1 << q
        has_x, has_z = bool(p.x_mask & bit), bool(p.z_mask & bit)
        if has_x and has_z:
            _apply_single_qubit(rotated, q, _SX)  # Sx ~ Rx(pi/2): maps Y -> Z
        elif has_x:
            _apply_single_qubit(rotated, q, _H)
    return np.abs(rotated.amplitudes) ** 2


def _readout_pipeline(
    outcomes: np.ndarray,
    n_qubits: int,
    rng: np.random.Generator,
    noise: ReadoutNoiseModel | None,
    twirl: bool,
) -> np.ndarray:
    """Apply (optional) X twirling and readout error to sampled bitstrings."""
    if twirl:
        masks = rng.integers(0, 1 << n_qubits, size=outcomes.size, dtype=np.int64)
        outcomes = outcomes ^ masks
    if noise is not None:
        for q in range(n_qubits):
            bit = np.int64(1 << q)
            ones = (outcomes & bit) != 0
            p_flip = np.where(ones, noise.p10[q], noise.p01[q])
            flips = rng.random(outcomes.size) < p_flip
            outcomes = np.where(flips, outcomes ^ bit, outcomes)
    if twirl:
        outcomes = outcomes ^ masks
    return outcomes


def _sample_term(
    state: StateVector,
    p: PauliString,
    shots: int,
    rng: np.random.Generator,
    noise: ReadoutNoiseModel | None,
    twirl: bool,
) -> tuple[float, float, np.ndarray]:
    """One twirled-readout estimate of <P>; returns (mean, variance-of-mean, outcomes)."""
    probs = _measurement_probabilities(state, p)
    outcomes = rng.choice(probs.size, size=shots, p=probs).astype(np.int64)
    outcomes = _readout_pipeline(outcomes, p.n_qubits, rng, noise, twirl)
    support = p.x_mask | p.z_mask
    values = 1.0 - 2.0 * (np.bitwise_count(outcomes & support) & 1)
    mean = float(values.mean())
    var = float(values.var(ddof=1) / shots) if shots > 1 else 0.0
    return mean, var, outcomes


def sample_expectation(
    state: StateVector,
    op,
    shots: int,
    seed: int,
    noise: ReadoutNoiseModel | None = None,
    twirl: bool = False,
    calibration_shots: int | None = None,
    return_records: bool = False,
):
    """Shot-based estimate of <op>, one Pauli term per measurement circuit.

    With ``twirl`` every shot applies a uniformly random X mask before
    readout and removes it afterwards, symmetrizing the error channel;
    each term is then divided by a twirled calibration factor measured on
    the all-zeros reference state (readout-error extinction).
    """
    if shots <= 0:
        raise ValueError("shots must be positive")
    source = op.source if isinstance(op, CompiledOperator) else op.simplify()
    if not source.is_hermitian():
        raise ValueError("sampling requires a Hermitian operator")
    if calibration_shots is None:
        calibration_shots = shots

    reference = StateVector(state.n_qubits) if twirl else None
    estimate = 0.0
    variance = 0.0
    records = []
    for k, (p, coeff) in enumerate(sorted(source.terms.items(), key=lambda t: t[0].sort_key())):
        c = complex(coeff).real
        if p.is_identity:
            estimate += c
            continue
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, k))))
        mean, var, outcomes = _sample_term(state, p, shots, rng, noise, twirl)
        if twirl:
            # calibrate the twirled readout attenuation of the DIAGONALIZED
            # observable: measure Z on the term's support directly on the
            # all-zeros reference, where its true expectation is +1
            cal_rng = np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, k, 1))))
            z_support = PauliString(p.n_qubits, 0, p.x_mask | p.z_mask)
            f_mean, f_var, _ = _sample_term(reference, z_support, calibration_shots, cal_rng, noise, True)
            f_mean = max(abs(f_mean), 1e-6) * (1.0 if f_mean >= 0 else -1.0)
            term_mean = mean / f_mean
            term_var = var / f_mean**2 + (mean**2 / f_mean**4) * f_var
        else:
            term_mean, term_var = mean, var
        estimate += c * term_mean
        variance += c * c * term_var
        if return_records:
            labels, counts = np.unique(outcomes, return_counts=True)
            fmt = "{:0" + str(state.n_qubits) + "b}"
            records.append(
                ShotResult(
                    basis=p,
                    shots=shots,
                    counts={fmt.format(int(l))[::-1]: int(n) for l, n in zip(labels, counts)},
                    seed=seed,
                )
            )
    stderr = float(np.sqrt(variance))
    if return_records:
        return estimate, stderr, records
    return estimate, stderr
