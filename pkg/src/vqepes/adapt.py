"""qubit-ADAPT-VQE: greedy ansatz growth from an operator pool.

Each outer iteration screens the energy gradient of every pool string at
zero angle, appends the largest-|g| string with a fresh parameter, and
re-optimizes all parameters warm-started from the previous optimum.  The
loop stops on the gradient threshold, on a small energy change between
consecutive outer iterations, or at the iteration cap.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ansatz import OperatorPool, ParameterizedCircuit, PauliRotation
from .pauli import PauliString
from .simulator import StateVector, apply_pauli_string, compile_operator, expectation, prepare_reference
from .vqe import VqeConfig, VqeResult, minimize, objective, gradient


@dataclass
class AdaptConfig:
    max_outer_iterations: int = 4
    grad_threshold: float = 1e-4    # Hartree/radian
    energy_threshold: float = 1e-3  # Hartree
    inner: VqeConfig = field(default_factory=VqeConfig)

    def __post_init__(self):
        if self.grad_threshold <= 0 or self.energy_threshold <= 0:
            raise ValueError("thresholds must be positive")


@dataclass
class AdaptResult:
    energies: list[float]               # reference energy followed by one entry per outer iteration
    chosen_ops: list[PauliString]
    params: np.ndarray
    final_circuit: ParameterizedCircuit
    stop_reason: str                    # gradient | energy | iteration-cap
    outer_iterations: int
    inner_iterations: int               # optimizer iterations summed over outer loops
    evaluations: int                    # objective evaluations summed over outer loops
    gradient_norms: list[float]         # max |pool gradient| per screening


def pool_gradients(state: StateVector, H, pool: OperatorPool) -> np.ndarray:
    """dE/dtheta at theta=0 for appending exp(-i theta/2 P) per pool string.

    Convention (finite-difference verified): appending U(theta) gives
    E(theta) = <psi|U^dag H U|psi> with dE/dtheta|_0 = Im <psi| H P |psi>.
    """
    if len(pool) == 0:
        raise ValueError("empty operator pool")
    compiled = compile_operator(H)
    h_psi = compiled.apply(state.amplitudes)
    out = np.zeros(len(pool))
    for k, p in enumerate(pool.ops):
        p_psi = state.copy()
        apply_pauli_string(p_psi, p)
        out[k] = float(np.imag(np.vdot(h_psi, p_psi.amplitudes)))
    return out


def run_adapt(H, pool: OperatorPool, reference: int, config: AdaptConfig | None = None) -> AdaptResult:
    """Grow and optimize the ADAPT ansatz until a stop criterion fires."""
    config = config or AdaptConfig()
    if len(pool) == 0:
        raise ValueError("empty operator pool")
    compiled = compile_operator(H)
    n_qubits = compiled.n_qubits

    circuit = ParameterizedCircuit(n_qubits, [], 0)
    params = np.zeros(0)
    reference_state = prepare_reference(reference, n_qubits)
    energies = [expectation(reference_state, compiled)]
    chosen: list[PauliString] = []
    grad_norms: list[float] = []
    inner_iterations = 0
    evaluations = 0
    stop_reason = "iteration-cap"

    for _ in range(config.max_outer_iterations):
        state = prepare_reference(reference, n_qubits)
        circuit.apply_to(state, params)
        grads = pool_gradients(state, compiled, pool)
        g_max = float(np.max(np.abs(grads)))
        grad_norms.append(g_max)
        if g_max < config.grad_threshold:
            stop_reason = "gradient"
            break
        pick = int(np.argmax(np.abs(grads)))  # ties resolve to the lowest index
        circuit.elements.append(PauliRotation(pool.ops[pick], circuit.n_params, scale=1.0))
        circuit.n_params += 1
        chosen.append(pool.ops[pick])
        params = np.append(params, 0.0)

        inner_cfg = VqeConfig(
            gradient=config.inner.gradient,
            max_iterations=config.inner.max_iterations,
            f_tol=config.inner.f_tol,
            g_tol=config.inner.g_tol,
            initial_params=params,
        )

        def f(x):
            return objective(circuit, x, compiled, reference)

        def g(x):
            return gradient(circuit, x, compiled, reference, method=inner_cfg.gradient)

        result: VqeResult = minimize(f, g, params, inner_cfg)
        params = result.params
        inner_iterations += result.iterations
        evaluations += result.evaluations
        energies.append(result.energy)
        if not result.converged:
            stop_reason = f"inner-optimizer: {result.stop_reason}"
            break
        if abs(energies[-1] - energies[-2]) < config.energy_threshold:
            stop_reason = "energy"
            break

    return AdaptResult(
        energies=energies,
        chosen_ops=chosen,
        params=params,
        final_circuit=circuit,
        stop_reason=stop_reason,
        outer_iterations=len(chosen),
        inner_iterations=inner_iterations,
        evaluations=evaluations,
        gradient_norms=grad_norms,
    )
