"""Exact ground-state reference via dense or Lanczos diagonalization.

The dense path is the oracle for small registers; above that a Lanczos
iteration with full reorthogonalization runs matrix-free on the grouped
Pauli-sum application, so no 2^n x 2^n matrix is ever formed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import QubitOperator
from .simulator import CompiledOperator, compile_operator

DENSE_QUBIT_LIMIT = 14
ITERATIVE_QUBIT_LIMIT = 24
_DEGENERACY_GAP = 1e-10


@dataclass
class GroundStateResult:
    energy: float
    degeneracy_flag: bool
    method: str


def _dense_ground_state(compiled: CompiledOperator) -> GroundStateResult:
    matrix = compiled._matrix
    if matrix is None:
        matrix = compiled._build_csr()
    evals = np.linalg.eigvalsh(matrix.toarray())
    gap = evals[1] - evals[0] if evals.size > 1 else np.inf
    return GroundStateResult(float(evals[0]), bool(gap < _DEGENERACY_GAP), "dense")


def _lanczos_lowest(
    apply_fn,
    dim: int,
    seed: int,
    tol: float,
    max_krylov: int,
    restarts: int = 5,
) -> tuple[float, float, np.ndarray]:
    """Lowest Ritz pair by Lanczos with full (twice-repeated) reorthogonalization.

    Returns (lowest eigenvalue, gap to the next Ritz value, eigenvector).
    """
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    best = None
    for restart in range(restarts):
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        v /= np.linalg.norm(v)
        basis = [v]
        alphas: list[float] = []
        betas: list[float] = []
        theta = gap = None
        for j in range(min(max_krylov, dim)):
            w = apply_fn(basis[j])
            alphas.append(float(np.real(np.vdot(basis[j], w))))
            w = w - alphas[j] * basis[j]
            if j > 0:
                w = w - betas[j - 1] * basis[j - 1]
            vb = np.array(basis)
            for _ in range(2):
                overlaps = vb.conj() @ w
                w = w - vb.T @ overlaps
            beta = float(np.linalg.norm(w))
            t = np.diag(alphas) + np.diag(betas, 1) + np.diag(betas, -1)
            evals, evecs = np.linalg.eigh(t)
            theta = float(evals[0])
            gap = float(evals[1] - evals[0]) if evals.size > 1 else np.inf
            residual_bound = beta * abs(evecs[-1, 0])
            if residual_bound < tol or beta < 1e-13 or j == dim - 1:
                x = np.array(basis).T @ evecs[:, 0]
                x /= np.linalg.norm(x)
                true_residual = float(np.linalg.norm(apply_fn(x) - theta * x))
                if true_residual < tol or beta < 1e-13:
                    return theta, gap, x
                break
            betas.append(beta)
            basis.append(w / beta)
        if best is None or (theta is not None and theta < best[0]):
            x = np.array(basis).T @ evecs[:, 0]
            best = (theta, gap, x / np.linalg.norm(x))
    raise RuntimeError(f"Lanczos failed to reach residual {tol} in {restarts} restarts")


def ground_state(
    H: QubitOperator | CompiledOperator,
    method: str = "auto",
    seed: int = 0,
    tol: float = 1e-9,
) -> GroundStateResult:
    """Minimum eigenvalue of a Hermitian Pauli sum."""
    compiled = compile_operator(H)
    if not compiled.source.is_hermitian():
        raise ValueError("ground_state requires a Hermitian operator")
    n = compiled.n_qubits
    if method == "auto":
        method = "dense" if n <= 10 else "iterative"
    if method == "dense":
        if n > DENSE_QUBIT_LIMIT:
            raise ValueError(f"dense diagonalization limited to {DENSE_QUBIT_LIMIT} qubits")
        return _dense_ground_state(compiled)
    if method != "iterative":
        raise ValueError(f"unknown method {method!r}")
    if n > ITERATIVE_QUBIT_LIMIT:
        raise ValueError(f"iterative diagonalization limited to {ITERATIVE_QUBIT_LIMIT} qubits")
    if compiled.dim <= 64:
        result = _dense_ground_state(compiled)
        return GroundStateResult(result.energy, result.degeneracy_flag, "iterative")
    energy, gap, _ = _lanczos_lowest(
        compiled.apply, compiled.dim, seed=seed, tol=tol, max_krylov=min(compiled.dim, 600)
    )
    return GroundStateResult(energy, bool(gap < _DEGENERACY_GAP), "iterative")


def ground_state_in_sector(
    H: QubitOperator | CompiledOperator,
    n_particles: int,
    method: str = "auto",
    seed: int = 0,
    tol: float = 1e-9,
) -> GroundStateResult:
    """Ground state restricted to basis states with popcount == n_particles."""
    compiled = compile_operator(H)
    if not compiled.source.is_hermitian():
        raise ValueError("ground_state requires a Hermitian operator")
    idx = np.arange(compiled.dim, dtype=np.int64)
    sector = idx[np.bitwise_count(idx) == n_particles]
    if sector.size == 0:
        raise ValueError(f"empty particle sector n={n_particles}")

    def apply_sector(v: np.ndarray) -> np.ndarray:
        full = np.zeros(compiled.dim, dtype=complex)
        full[sector] = v
        return compiled.apply(full)[sector]

    def dense_sector(tag: str) -> GroundStateResult:
        if compiled._matrix is not None:
            sub = compiled._matrix[sector][:, sector].toarray()
        else:
            cols = np.eye(sector.size, dtype=complex)
            sub = np.column_stack([apply_sector(cols[:, k]) for k in range(sector.size)])
        evals = np.linalg.eigvalsh(sub)
        gap = evals[1] - evals[0] if evals.size > 1 else np.inf
        return GroundStateResult(float(evals[0]), bool(gap < _DEGENERACY_GAP), tag)

    n = compiled.n_qubits
    if method == "auto":
        method = "dense" if sector.size <= 2048 else "iterative"
    if method == "dense":
        if n > DENSE_QUBIT_LIMIT:
            raise ValueError(f"dense diagonalization limited to {DENSE_QUBIT_LIMIT} qubits")
        return dense_sector("dense")
    if sector.size <= 64:
        return dense_sector("iterative")
    energy, gap, _ = _lanczos_lowest(
        apply_sector, sector.size, seed=seed, tol=tol, max_krylov=min(sector.size, 600)
    )
    return GroundStateResult(energy, bool(gap < _DEGENERACY_GAP), "iterative")
