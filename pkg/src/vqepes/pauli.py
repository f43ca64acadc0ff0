"""Pauli-string algebra in symplectic (bitmask) form.

A Pauli word on n qubits is stored as two integer bitmasks: bit i of
``x_mask``/``z_mask`` says whether the word acts with X/Z on qubit i, and
(1,1) encodes Y.  Products, commutation checks and Y-parity are then O(1)
bit operations, which matters because the simulator and the ADAPT pool
filter hit these in inner loops.  Phases never live on the string itself;
they belong to the owning term's coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Below this magnitude a coefficient is treated as zero: far below chemical
# accuracy (1e-3 Ha) but above double-precision round-off accumulation.
COEFF_CUTOFF = 1e-12

_SINGLE_QUBIT = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_PHASES = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


@dataclass(frozen=True)
class PauliString:
    """Immutable Pauli word; qubit i is encoded in bit i of the masks."""

    n_qubits: int
    x_mask: int
    z_mask: int

    def __post_init__(self):
        limit = 1 << self.n_qubits
        if not (0 <= self.x_mask < limit and 0 <= self.z_mask < limit):
            raise ValueError("mask exceeds qubit count")

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits, 0, 0)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse e.g. "XIYZ"; character k acts on qubit k."""
        x = z = 0
        for k, ch in enumerate(label):
            if ch == "X":
                x |= 1 << k
            elif ch == "Y":
                x |= 1 << k
                z |= 1 << k
            elif ch == "Z":
                z |= 1 << k
            elif ch != "I":
                raise ValueError(f"invalid Pauli letter {ch!r}")
        return cls(len(label), x, z)

    @classmethod
    def from_sparse(cls, n_qubits: int, letters: dict[int, str]) -> "PauliString":
        x = z = 0
        for q, ch in letters.items():
            if not 0 <= q < n_qubits:
                raise ValueError(f"qubit {q} out of range")
            if ch in ("X", "Y"):
                x |= 1 << q
            if ch in ("Y", "Z"):
                z |= 1 << q
        return cls(n_qubits, x, z)

    def label(self) -> str:
        out = []
        for k in range(self.n_qubits):
            bit = 1 << k
            xk, zk = bool(self.x_mask & bit), bool(self.z_mask & bit)
            out.append("IXZY"[xk + 2 * zk])
        return "".join(out)

    def sparse_label(self) -> str:
        """Compact form like "X0Y1" used by the circuit text format."""
        parts = []
        for k in range(self.n_qubits):
            bit = 1 << k
            xk, zk = bool(self.x_mask & bit), bool(self.z_mask & bit)
            if xk or zk:
                parts.append(("Y" if xk and zk else "X" if xk else "Z") + str(k))
        return "".join(parts) if parts else "I"

    @property
    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    def weight(self) -> int:
        return (self.x_mask | self.z_mask).bit_count()

    def support(self) -> list[int]:
        m = self.x_mask | self.z_mask
        return [k for k in range(self.n_qubits) if m & (1 << k)]

    def y_count(self) -> int:
        return (self.x_mask & self.z_mask).bit_count()

    def y_parity(self) -> str:
        """'odd' or 'even' number of Y letters (identity counts as even)."""
        return "odd" if self.y_count() & 1 else "even"

    def commutes(self, other: "PauliString") -> bool:
        if self.n_qubits != other.n_qubits:
            raise ValueError("qubit-count mismatch")
        anti = (self.x_mask & other.z_mask).bit_count() + (self.z_mask & other.x_mask).bit_count()
        return anti % 2 == 0

    def __mul__(self, other: "PauliString") -> tuple["PauliString", complex]:
        return multiply(self, other)

    def to_matrix(self) -> np.ndarray:
        if self.n_qubits > 12:
            raise ValueError("dense matrix limited to 12 qubits")
        m = np.array([[1.0 + 0j]])
        label = self.label()
        # qubit 0 is the least-significant index bit, so it goes innermost
        for k in range(self.n_qubits):
            m = np.kron(_SINGLE_QUBIT[label[k]], m)
        return m

    def sort_key(self) -> tuple[int, int]:
        return (self.z_mask, self.x_mask)

    def __str__(self) -> str:
        return self.label()


def multiply(p: PauliString, q: PauliString) -> tuple[PauliString, complex]:
    """Product of two Pauli words: matrix(p) @ matrix(q) == phase * matrix(r).

    Uses the convention P = i^{#Y} X^x Z^z; commuting Z^zp past X^xq picks
    up (-1)^{|zp & xq|} and the leftover i-powers give the group phase.
    """
    if p.n_qubits != q.n_qubits:
        raise ValueError("qubit-count mismatch")
    x = p.x_mask ^ q.x_mask
    z = p.z_mask ^ q.z_mask
    y_p = (p.x_mask & p.z_mask).bit_count()
    y_q = (q.x_mask & q.z_mask).bit_count()
    y_r = (x & z).bit_count()
    exponent = (y_p + y_q - y_r + 2 * (p.z_mask & q.x_mask).bit_count()) % 4
    return PauliString(p.n_qubits, x, z), _PHASES[exponent]


def commutes(p: PauliString, q: PauliString) -> bool:
    return p.commutes(q)


def y_parity(p: PauliString) -> str:
    return p.y_parity()


class QubitOperator:
    """Complex-weighted sum of Pauli strings on a fixed qubit count.

    Terms live in a dict keyed by PauliString; accumulation merges
    duplicates on the fly, and ``simplify`` prunes tiny coefficients and
    freezes the canonical (z_mask, x_mask)-sorted order.
    """

    def __init__(self, n_qubits: int, terms: dict[PauliString, complex] | None = None):
        self.n_qubits = n_qubits
        self.terms: dict[PauliString, complex] = dict(terms) if terms else {}

    @classmethod
    def zero(cls, n_qubits: int) -> "QubitOperator":
        return cls(n_qubits)

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> "QubitOperator":
        return cls(n_qubits, {PauliString.identity(n_qubits): coeff})

    @classmethod
    def from_term(cls, p: PauliString, coeff: complex = 1.0) -> "QubitOperator":
        return cls(p.n_qubits, {p: coeff})

    def copy(self) -> "QubitOperator":
        return QubitOperator(self.n_qubits, self.terms)

    def add_term(self, p: PauliString, coeff: complex) -> None:
        if p.n_qubits != self.n_qubits:
            raise ValueError("qubit-count mismatch")
        self.terms[p] = self.terms.get(p, 0.0) + coeff

    def __add__(self, other: "QubitOperator") -> "QubitOperator":
        if self.n_qubits != other.n_qubits:
            raise ValueError("qubit-count mismatch")
        out = self.copy()
        for p, c in other.terms.items():
            out.add_term(p, c)
        return out

    def __sub__(self, other: "QubitOperator") -> "QubitOperator":
        return self + (other * -1.0)

    def __mul__(self, other):
        if isinstance(other, QubitOperator):
            if self.n_qubits != other.n_qubits:
                raise ValueError("qubit-count mismatch")
            out = QubitOperator(self.n_qubits)
            for p, cp in self.terms.items():
                for q, cq in other.terms.items():
                    r, phase = multiply(p, q)
                    out.add_term(r, cp * cq * phase)
            return out
        return QubitOperator(self.n_qubits, {p: c * other for p, c in self.terms.items()})

    __rmul__ = __mul__

    def simplify(self, cutoff: float = COEFF_CUTOFF) -> "QubitOperator":
        kept = {p: c for p, c in self.terms.items() if abs(c) >= cutoff}
        ordered = dict(sorted(kept.items(), key=lambda item: item[0].sort_key()))
        return QubitOperator(self.n_qubits, ordered)

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return all(abs(c.imag) < tol for c in map(complex, self.terms.values()))

    def n_terms(self) -> int:
        return len(self.terms)

    def identity_coefficient(self) -> complex:
        return self.terms.get(PauliString.identity(self.n_qubits), 0.0)

    def to_matrix(self) -> np.ndarray:
        if self.n_qubits > 12:
            raise ValueError("dense matrix limited to 12 qubits")
        dim = 1 << self.n_qubits
        m = np.zeros((dim, dim), dtype=complex)
        for p, c in self.terms.items():
            m += complex(c) * p.to_matrix()
        return m

    def __str__(self) -> str:
        op = self.simplify()
        if not op.terms:
            return "0"
        parts = []
        for p, c in op.terms.items():
            c = complex(c)
            coeff = repr(c.real) if c.imag == 0.0 else repr(c)
            parts.append(f"{coeff} * {p.label()}")
        return " + ".join(parts)

    @classmethod
    def parse(cls, text: str, n_qubits: int | None = None) -> "QubitOperator":
        """Inverse of __str__: terms like "1.5 * XIYZ" joined by " + "."""
        text = text.strip()
        if text == "0":
            if n_qubits is None:
                raise ValueError("qubit count required to parse the zero operator")
            return cls.zero(n_qubits)
        out = None
        for chunk in text.split(" + "):
            coeff_str, _, label = chunk.partition("*")
            if not label:
                raise ValueError(f"malformed term {chunk!r}")
            coeff = complex(coeff_str.strip())
            p = PauliString.from_label(label.strip())
            if out is None:
                out = cls.zero(p.n_qubits if n_qubits is None else n_qubits)
            out.add_term(p, coeff)
        return out


def simplify(op: QubitOperator) -> QubitOperator:
    return op.simplify()


def to_matrix(op: QubitOperator) -> np.ndarray:
    return op.to_matrix()
