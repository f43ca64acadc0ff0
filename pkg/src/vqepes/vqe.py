"""The variational loop: objective, exact gradients, quasi-Newton minimizer.

Gradients come in three flavors.  ``adjoint`` (the default) computes the
same analytic values as the parameter-shift rule with one forward and one
backward sweep over the circuit instead of two objective evaluations per
rotation, which is what makes the larger active spaces affordable.
``parameter-shift`` evaluates the literal +-pi/2 shifted circuits and
``finite-difference`` is the independent check.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .ansatz import ParamGate, ParameterizedCircuit, PauliRotation
from .pauli import PauliString
from .simulator import (
    CompiledOperator,
    StateVector,
    apply_gate,
    apply_pauli_rotation,
    apply_pauli_string,
    compile_operator,
    expectation,
    prepare_reference,
)


@dataclass
class VqeConfig:
    gradient: str = "adjoint"  # adjoint | parameter-shift | finite-difference
    max_iterations: int = 1000
    f_tol: float = 1e-8       # energy-change tolerance, Hartree
    g_tol: float = 1e-6       # gradient sup-norm tolerance
    initial_params: np.ndarray | str = "zeros"

    def __post_init__(self):
        if self.f_tol <= 0 or self.g_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.gradient not in ("adjoint", "parameter-shift", "finite-difference"):
            raise ValueError(f"unknown gradient mode {self.gradient!r}")


@dataclass
class VqeResult:
    energy: float
    params: np.ndarray
    iterations: int
    evaluations: int
    history: list[float]
    converged: bool
    stop_reason: str
    wall_time_s: float = 0.0


def _prepared_state(circuit: ParameterizedCircuit, params, reference: int,
                    angle_override=None) -> StateVector:
    state = prepare_reference(reference, circuit.n_qubits)
    circuit.apply_to(state, params, angle_override)
    return state


def objective(circuit: ParameterizedCircuit, params, H, reference: int) -> float:
    """E(theta) = <psi(theta)|H|psi(theta)>, exact expectation."""
    params = np.asarray(params, dtype=float)
    if params.shape != (circuit.n_params,):
        raise ValueError("parameter vector has wrong length")
    compiled = compile_operator(H)
    return expectation(_prepared_state(circuit, params, reference), compiled)


def _gate_generator(el, n_qubits: int) -> PauliString:
    letter = "Y" if el.kind == "RY" else "Z"
    return PauliString.from_sparse(n_qubits, {el.qubit: letter})


def _unapply(state: StateVector, el, params) -> None:
    if isinstance(el, PauliRotation):
        apply_pauli_rotation(state, el.pauli, -el.scale * params[el.param_index])
    elif isinstance(el, ParamGate):
        apply_gate(state, el.kind, el.qubit, theta=-params[el.param_index])
    elif el.kind == "CNOT":
        apply_gate(state, "CNOT", el.qubits)
    else:  # X is its own inverse
        apply_gate(state, "X", el.qubits)


def gradient_adjoint(circuit: ParameterizedCircuit, params, H, reference: int) -> np.ndarray:
    """Reverse-mode exact gradient: one forward pass, one backward sweep.

    For U_k = exp(-i s theta/2 P), dE/dtheta accumulates s * Im<lam|P|psi_k>
    per occurrence, identical to the parameter-shift values to round-off.
    """
    params = np.asarray(params, dtype=float)
    compiled = compile_operator(H)
    psi = _prepared_state(circuit, params, reference)
    lam = StateVector(circuit.n_qubits, compiled.apply(psi.amplitudes))
    grad = np.zeros(circuit.n_params)
    for el in reversed(circuit.elements):
        if isinstance(el, (PauliRotation, ParamGate)):
            p = el.pauli if isinstance(el, PauliRotation) else _gate_generator(el, circuit.n_qubits)
            scale = el.scale if isinstance(el, PauliRotation) else 1.0
            p_psi = psi.copy()
            apply_pauli_string(p_psi, p)
            grad[el.param_index] += scale * float(
                np.imag(np.vdot(lam.amplitudes, p_psi.amplitudes))
            )
        _unapply(psi, el, params)
        _unapply(lam, el, params)
    return grad


def gradient_parameter_shift(circuit: ParameterizedCircuit, params, H, reference: int) -> np.ndarray:
    """Literal parameter-shift: per occurrence, dE/dtheta = s/2 [E(+pi/2) - E(-pi/2)]
    where the shift is applied to that occurrence's rotation angle."""
    params = np.asarray(params, dtype=float)
    compiled = compile_operator(H)
    grad = np.zeros(circuit.n_params)
    for pos, el in enumerate(circuit.elements):
        if not isinstance(el, (PauliRotation, ParamGate)):
            continue
        scale = el.scale if isinstance(el, PauliRotation) else 1.0
        e_plus = expectation(_prepared_state(circuit, params, reference, {pos: +np.pi / 2}), compiled)
        e_minus = expectation(_prepared_state(circuit, params, reference, {pos: -np.pi / 2}), compiled)
        grad[el.param_index] += 0.5 * scale * (e_plus - e_minus)
    return grad


def gradient_finite_difference(
    circuit: ParameterizedCircuit, params, H, reference: int, h: float = 1e-5
) -> np.ndarray:
    params = np.asarray(params, dtype=float)
    compiled = compile_operator(H)
    grad = np.zeros(circuit.n_params)
    for k in range(circuit.n_params):
        shifted = params.copy()
        shifted[k] += h
        e_plus = objective(circuit, shifted, compiled, reference)
        shifted[k] -= 2 * h
        e_minus = objective(circuit, shifted, compiled, reference)
        grad[k] = (e_plus - e_minus) / (2 * h)
    return grad


def gradient(circuit: ParameterizedCircuit, params, H, reference: int,
             method: str = "adjoint") -> np.ndarray:
    if method == "adjoint":
        return gradient_adjoint(circuit, params, H, reference)
    if method == "parameter-shift":
        return gradient_parameter_shift(circuit, params, H, reference)
    if method == "finite-difference":
        return gradient_finite_difference(circuit, params, H, reference)
    raise ValueError(f"unknown gradient method {method!r}")


# ---------------------------------------------------------------------------
# BFGS with a strong-Wolfe line search (Nocedal & Wright alg. 3.5/3.6).

_C1 = 1e-4
_C2 = 0.9


class _LineSearchFailure(Exception):
    pass


def _wolfe_line_search(fg, x, p, f0, g0, max_steps: int = 25):
    """Return (alpha, f_new, g_new) satisfying the strong Wolfe conditions."""
    d0 = float(np.dot(g0, p))
    if d0 >= 0:
        raise _LineSearchFailure("search direction is not a descent direction")

    def phi(alpha):
        f, g = fg(x + alpha * p)
        return f, g, float(np.dot(g, p))

    alpha_prev, f_prev, d_prev = 0.0, f0, d0
    alpha = 1.0
    f_alpha, g_alpha, d_alpha = phi(alpha)
    for _ in range(max_steps):
        if f_alpha > f0 + _C1 * alpha * d0 or (f_prev < f_alpha and alpha_prev > 0.0):
            return _zoom(phi, alpha_prev, alpha, f_prev, f_alpha, d_prev, f0, d0)
        if abs(d_alpha) <= -_C2 * d0:
            return alpha, f_alpha, g_alpha
        if d_alpha >= 0:
            return _zoom(phi, alpha, alpha_prev, f_alpha, f_prev, d_alpha, f0, d0)
        alpha_prev, f_prev, d_prev = alpha, f_alpha, d_alpha
        alpha *= 2.0
        f_alpha, g_alpha, d_alpha = phi(alpha)
    raise _LineSearchFailure("strong Wolfe conditions not met")


def _zoom(phi, lo, hi, f_lo, f_hi, d_lo, f0, d0, max_steps: int = 30):
    for _ in range(max_steps):
        alpha = 0.5 * (lo + hi)
        f_alpha, g_alpha, d_alpha = phi(alpha)
        if f_alpha > f0 + _C1 * alpha * d0 or f_alpha >= f_lo:
            hi, f_hi = alpha, f_alpha
        else:
            if abs(d_alpha) <= -_C2 * d0:
                return alpha, f_alpha, g_alpha
            if d_alpha * (hi - lo) >= 0:
                hi, f_hi = lo, f_lo
            lo, f_lo, d_lo = alpha, f_alpha, d_alpha
        if abs(hi - lo) < 1e-16:
            break
    raise _LineSearchFailure("zoom interval collapsed")


def minimize(objective_fn, gradient_fn, x0: np.ndarray, config: VqeConfig) -> VqeResult:
    """Quasi-Newton (BFGS) minimization; returns the best point seen.

    Converged when |dE| < f_tol or the gradient sup-norm drops below
    g_tol; a line-search failure returns the best-so-far result with the
    non-converged flag set.
    """
    t0 = time.perf_counter()
    evaluations = 0

    def fg(x):
        nonlocal evaluations
        evaluations += 1
        return objective_fn(x), gradient_fn(x)

    x = np.asarray(x0, dtype=float).copy()
    n = x.size
    f, g = fg(x)
    best_x, best_f = x.copy(), f
    history = [f]
    h_inv = np.eye(n)
    iterations = 0
    converged = False
    stop_reason = "iteration-cap"

    if n == 0:
        return VqeResult(f, x, 0, evaluations, history, True, "empty-parameter-space",
                         time.perf_counter() - t0)

    while iterations < config.max_iterations:
        if float(np.max(np.abs(g))) < config.g_tol:
            converged, stop_reason = True, "gradient"
            break
        p = -h_inv @ g
        try:
            alpha, f_new, g_new = _wolfe_line_search(fg, x, p, f, g)
        except _LineSearchFailure as err:
            stop_reason = f"line-search-failure: {err}"
            break
        s = alpha * p
        y = g_new - g
        x = x + s
        iterations += 1
        history.append(f_new)
        if f_new < best_f:
            best_f, best_x = f_new, x.copy()
        delta = abs(f_new - f)
        f, g = f_new, g_new
        if delta < config.f_tol:
            converged, stop_reason = True, "energy"
            break
        sy = float(np.dot(s, y))
        if sy > 1e-14:
            rho = 1.0 / sy
            outer_sy = np.outer(s, y)
            h_inv = (np.eye(n) - rho * outer_sy) @ h_inv @ (np.eye(n) - rho * outer_sy.T)
            h_inv += rho * np.outer(s, s)

    if float(np.max(np.abs(g))) < config.g_tol:
        converged = True
        if stop_reason == "iteration-cap":
            stop_reason = "gradient"

    return VqeResult(
        energy=best_f,
        params=best_x,
        iterations=iterations,
        evaluations=evaluations,
        history=history,
        converged=converged,
        stop_reason=stop_reason,
        wall_time_s=time.perf_counter() - t0,
    )


def run_vqe(
    circuit: ParameterizedCircuit,
    H,
    reference: int,
    config: VqeConfig | None = None,
) -> VqeResult:
    """Minimize the circuit energy from the configured starting point."""
    config = config or VqeConfig()
    compiled = compile_operator(H)
    if isinstance(config.initial_params, str):
        if config.initial_params != "zeros":
            raise ValueError(f"unknown initial_params rule {config.initial_params!r}")
        x0 = np.zeros(circuit.n_params)
    else:
        x0 = np.asarray(config.initial_params, dtype=float)

    def f(x):
        return objective(circuit, x, compiled, reference)

    def g(x):
        return gradient(circuit, x, compiled, reference, method=config.gradient)

    return minimize(f, g, x0, config)
