from pathlib import Path

import numpy as np
import pytest

from vqepes.adapt import AdaptConfig, AdaptResult, pool_gradients, run_adapt
from vqepes.ansatz import OperatorPool, PauliRotation, ParameterizedCircuit, build_pool, uccsd_excitations
from vqepes.benchmark import ground_state_in_sector
from vqepes.fermion import build_hamiltonian, hf_reference, jordan_wigner, parse_fcidump
from vqepes.pauli import PauliString, QubitOperator
from vqepes.simulator import StateVector, compile_operator, expectation, prepare_reference
from vqepes.vqe import objective

FIXTURES = Path(__file__).resolve().parent.parent / "data" / "fixtures"


def h2_problem(distance="0.90"):
    data = parse_fcidump((FIXTURES / "h2" / f"h2_d{distance}.fcidump").read_text())
    H = compile_operator(jordan_wigner(build_hamiltonian(data.h1, data.h2, data.e_core)))
    pool = build_pool(uccsd_excitations(2, 4))
    return H, pool, hf_reference(2, 4)


def fd_append_gradient(state, H, p, h=1e-5):
    up, down = state.copy(), state.copy()
    from vqepes.simulator import apply_pauli_rotation
    apply_pauli_rotation(up, p, h)
    apply_pauli_rotation(down, p, -h)
    return (expectation(up, H) - expectation(down, H)) / (2 * h)


class TestPoolGradients:
    def test_single_qubit_cases(self):
        # E(theta) = +-cos(theta) for both basis states, so the append
        # gradient vanishes there; |g| = 1 on the equator state.  All three
        # values verified against the finite-difference oracle below.
        H = compile_operator(QubitOperator.from_term(PauliString.from_label("Z"), 1.0))
        pool = OperatorPool([PauliString.from_label("Y")], ["toy"])
        ground = prepare_reference(0b1, 1)
        excited = prepare_reference(0b0, 1)
        equator = StateVector(1, np.array([1.0, 1.0]) / np.sqrt(2.0))
        for state, expected in ((ground, 0.0), (excited, 0.0), (equator, -1.0)):
            g = pool_gradients(state, H, pool)[0]
            assert g == pytest.approx(expected, abs=1e-12)
            assert g == pytest.approx(fd_append_gradient(state, H, pool.ops[0]), abs=1e-7)

    def test_commuting_string_gives_zero(self):
        H = compile_operator(QubitOperator.from_term(PauliString.from_label("ZZ"), 0.8))
        pool = OperatorPool([PauliString.from_label("ZI")], ["toy"])
        rng = np.random.default_rng(0)
        amps = rng.normal(size=4) + 1j * rng.normal(size=4)
        state = StateVector(2, amps / np.linalg.norm(amps))
        assert pool_gradients(state, H, pool)[0] == pytest.approx(0.0, abs=1e-12)

    def test_matches_finite_difference_at_random_states(self):
        H, pool, ref = h2_problem()
        rng = np.random.default_rng(1)
        for trial in range(3):
            amps = rng.normal(size=16) + 1j * rng.normal(size=16)
            state = StateVector(4, amps / np.linalg.norm(amps))
            grads = pool_gradients(state, H, pool)
            for k, p in enumerate(pool.ops):
                assert grads[k] == pytest.approx(fd_append_gradient(state, H, p), abs=1e-7)

    def test_largest_gradient_is_double_at_hf(self):
        H, pool, ref = h2_problem()
        state = prepare_reference(ref, 4)
        grads = np.abs(pool_gradients(state, H, pool))
        best = pool.ops[int(np.argmax(grads))]
        assert best.weight() == 4  # double-excitation family

    def test_empty_pool(self):
        H, _, ref = h2_problem()
        with pytest.raises(ValueError):
            pool_gradients(prepare_reference(ref, 4), H, OperatorPool([], []))


class TestRunAdapt:
    def test_h2_reaches_fci_with_two_ops(self):
        H, pool, ref = h2_problem()
        res = run_adapt(H, pool, ref, AdaptConfig())
        fci = ground_state_in_sector(H, 2).energy
        assert len(res.chosen_ops) <= 2
        assert res.energies[-1] == pytest.approx(fci, abs=1e-3)

    def test_degenerate_threshold_returns_reference(self):
        H, pool, ref = h2_problem()
        config = AdaptConfig(grad_threshold=np.inf)
        res = run_adapt(H, pool, ref, config)
        assert res.chosen_ops == []
        assert res.stop_reason == "gradient"
        hf = expectation(prepare_reference(ref, 4), H)
        assert res.energies == [pytest.approx(hf)]

    def test_energies_non_increasing(self):
        H, pool, ref = h2_problem("1.80")
        res = run_adapt(H, pool, ref, AdaptConfig(energy_threshold=1e-7, max_outer_iterations=6))
        diffs = np.diff(res.energies)
        assert np.all(diffs <= 1e-10)

    def test_determinism(self):
        H, pool, ref = h2_problem()
        a = run_adapt(H, pool, ref, AdaptConfig())
        b = run_adapt(H, pool, ref, AdaptConfig())
        assert a.chosen_ops == b.chosen_ops
        assert a.energies == b.energies

    def test_chosen_ops_subset_of_pool_and_capped(self):
        H, pool, ref = h2_problem("2.40")
        config = AdaptConfig(max_outer_iterations=3, energy_threshold=1e-9, grad_threshold=1e-7)
        res = run_adapt(H, pool, ref, config)
        assert len(res.chosen_ops) <= 3
        assert all(p in pool.ops for p in res.chosen_ops)

    def test_final_circuit_reproduces_energy(self):
        H, pool, ref = h2_problem()
        res = run_adapt(H, pool, ref, AdaptConfig())
        e = objective(res.final_circuit, res.params, H, ref)
        assert e == pytest.approx(res.energies[-1], abs=1e-12)

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            AdaptConfig(grad_threshold=0.0)
