from pathlib import Path

import numpy as np
import pytest

from vqepes.fermion import (
    ActiveSpaceSpec,
    FcidumpData,
    FcidumpError,
    FermionOperator,
    build_hamiltonian,
    determinant_energy,
    fold_active_space,
    hf_reference,
    jordan_wigner,
    parse_fcidump,
    read_sidecar,
    write_fcidump,
)
from vqepes.pauli import PauliString, QubitOperator

FIXTURES = Path(__file__).resolve().parent.parent / "data" / "fixtures"


def random_integrals(rng, n):
    h1 = rng.normal(size=(n, n))
    h1 = 0.5 * (h1 + h1.T)
    g = rng.normal(size=(n, n, n, n))
    # symmetrize to the full 8-fold group
    g = g + g.transpose(1, 0, 2, 3)
    g = g + g.transpose(0, 1, 3, 2)
    g = g + g.transpose(2, 3, 0, 1)
    return h1, g


class TestParseFcidump:
    def test_minimal_file(self):
        text = " &FCI NORB=1,NELEC=2,MS2=0,\n &END\n 0.5 1 1 0 0\n 1.0 0 0 0 0\n"
        data = parse_fcidump(text)
        assert data.n_orb == 1 and data.n_elec == 2
        assert data.h1[0, 0] == 0.5
        assert data.e_core == 1.0

    def test_symmetry_completion(self):
        text = " &FCI NORB=2,NELEC=2,MS2=0,\n &END\n 0.7 1 1 2 1\n"
        data = parse_fcidump(text)
        val = data.h2[0, 0, 1, 0]
        perms = [(0, 0, 1, 0), (0, 0, 0, 1), (1, 0, 0, 0), (0, 1, 0, 0)]
        for p in perms:
            assert data.h2[p] == val == 0.7

    def test_h2_fixture(self):
        path = FIXTURES / "h2" / "h2_d0.74.fcidump"
        if not path.exists():
            path = sorted((FIXTURES / "h2").glob("*_d0.60.fcidump"))[0]
        data = parse_fcidump(path.read_text())
        assert data.n_orb == 2 and data.n_elec == 2
        data.validate_symmetry()

    def test_h2_fixture_core_energy_at_contact_distance(self):
        # 1/r at 0.60 A in Hartree
        data = parse_fcidump((FIXTURES / "h2" / "h2_d0.60.fcidump").read_text())
        assert data.e_core == pytest.approx(0.529177 / 0.60, rel=1e-4)

    def test_malformed_header(self):
        with pytest.raises(FcidumpError, match="line 1"):
            parse_fcidump("NORB=2\n 1.0 0 0 0 0\n")

    def test_index_out_of_range(self):
        with pytest.raises(FcidumpError, match="line 3"):
            parse_fcidump(" &FCI NORB=1,NELEC=2,MS2=0,\n &END\n 0.5 2 1 0 0\n")

    def test_non_numeric_value(self):
        with pytest.raises(FcidumpError, match="line 3"):
            parse_fcidump(" &FCI NORB=1,NELEC=2,MS2=0,\n &END\n oops 1 1 0 0\n")

    def test_round_trip(self):
        rng = np.random.default_rng(0)
        h1, g = random_integrals(rng, 3)
        data = FcidumpData(3, 4, 0, h1, g, -7.25)
        parsed = parse_fcidump(write_fcidump(data))
        np.testing.assert_allclose(parsed.h1, h1, atol=1e-12)
        np.testing.assert_allclose(parsed.h2, g, atol=1e-12)
        assert parsed.e_core == pytest.approx(-7.25)


class TestFoldActiveSpace:
    def test_full_space_is_identity(self):
        rng = np.random.default_rng(1)
        h1, g = random_integrals(rng, 4)
        data = FcidumpData(4, 4, 0, h1, g, 0.3)
        h_eff, g_act, e_core = fold_active_space(data, ActiveSpaceSpec(4, 4))
        np.testing.assert_allclose(h_eff, h1)
        np.testing.assert_allclose(g_act, g)
        assert e_core == pytest.approx(0.3)

    def test_two_orbital_toy_hand_algebra(self):
        # freeze orbital 0 of a 2-orbital system with hand-set integrals
        h1 = np.array([[-2.0, 0.1], [0.1, -1.0]])
        g = np.zeros((2, 2, 2, 2))
        g[0, 0, 0, 0] = 0.7
        g[1, 1, 1, 1] = 0.6
        for p in [(0, 0, 1, 1), (1, 1, 0, 0)]:
            g[p] = 0.5
        for p in [(0, 1, 1, 0), (1, 0, 0, 1), (0, 1, 0, 1), (1, 0, 1, 0)]:
            g[p] = 0.2
        data = FcidumpData(2, 4, 0, h1, g, 1.5)
        h_eff, g_act, e_core = fold_active_space(data, ActiveSpaceSpec(2, 1))
        # e_core_eff = e_core + 2 h00 + (00|00)
        assert e_core == pytest.approx(1.5 + 2 * (-2.0) + 0.7)
        # h_eff_11 = h11 + 2(11|00) - (10|01)
        assert h_eff[0, 0] == pytest.approx(-1.0 + 2 * 0.5 - 0.2)
        assert g_act[0, 0, 0, 0] == pytest.approx(0.6)

    def test_hf_energy_invariance_on_h2o_fixture(self):
        path = FIXTURES / "h2o_full" / "h2o_full_d0.00.fcidump"
        data = parse_fcidump(path.read_text())
        meta = read_sidecar((FIXTURES / "h2o_full" / "h2o_full_d0.00.meta").read_text())
        e_full = determinant_energy(data.h1, data.h2, data.e_core, data.n_elec)
        assert e_full == pytest.approx(float(meta["hf_energy_ha"]), abs=1e-8)
        h_eff, g_act, e_core = fold_active_space(data, ActiveSpaceSpec(6, 7))
        e_folded = determinant_energy(h_eff, g_act, e_core, 6)
        assert e_folded == pytest.approx(e_full, abs=1e-8)

    def test_odd_frozen_count_rejected(self):
        rng = np.random.default_rng(2)
        h1, g = random_integrals(rng, 4)
        data = FcidumpData(4, 6, 0, h1, g, 0.0)
        with pytest.raises(ValueError, match="closed-shell"):
            fold_active_space(data, ActiveSpaceSpec(3, 2))

    def test_window_exceeds_orbitals(self):
        rng = np.random.default_rng(3)
        h1, g = random_integrals(rng, 3)
        data = FcidumpData(3, 4, 0, h1, g, 0.0)
        with pytest.raises(ValueError, match="window exceeds"):
            fold_active_space(data, ActiveSpaceSpec(2, 3))


class TestBuildHamiltonian:
    def test_single_orbital(self):
        h1 = np.array([[0.25]])
        g = np.zeros((1, 1, 1, 1))
        op = build_hamiltonian(h1, g, 1.25)
        terms = {ladder: c for ladder, c in op.terms}
        assert terms[()] == 1.25
        assert terms[((0, True), (0, False))] == 0.25
        assert terms[((1, True), (1, False))] == 0.25

    def test_all_zero_integrals(self):
        op = build_hamiltonian(np.zeros((2, 2)), np.zeros((2,) * 4), -3.0)
        assert len(op.terms) == 1 and op.terms[0][1] == -3.0

    def test_h2_ground_state_is_fci(self):
        data = parse_fcidump((FIXTURES / "h2" / "h2_d0.90.fcidump").read_text())
        from vqepes.benchmark import ground_state
        H = jordan_wigner(build_hamiltonian(data.h1, data.h2, data.e_core))
        dense = ground_state(H, method="dense")
        mat = H.to_matrix()
        ref = np.linalg.eigvalsh(mat)[0]
        assert dense.energy == pytest.approx(ref, abs=1e-10)


class TestJordanWigner:
    def test_number_operator(self):
        op = FermionOperator(2)
        op.add(((0, True), (0, False)), 1.0)
        mapped = jordan_wigner(op)
        expected = QubitOperator(2)
        expected.add_term(PauliString.identity(2), 0.5)
        expected.add_term(PauliString.from_sparse(2, {0: "Z"}), -0.5)
        diff = (mapped - expected).simplify()
        assert diff.terms == {}

    def test_hopping_term(self):
        op = FermionOperator(2)
        op.add(((0, True), (1, False)), 1.0)
        op.add(((1, True), (0, False)), 1.0)
        mapped = jordan_wigner(op)
        ref = 0.5 * (
            QubitOperator.from_term(PauliString.from_label("XX"), 1.0)
            + QubitOperator.from_term(PauliString.from_label("YY"), 1.0)
        )
        np.testing.assert_allclose(mapped.to_matrix(), ref.to_matrix(), atol=1e-12)

    def test_canonical_anticommutation_relations(self):
        # {a_i, a+_j} = delta_ij, {a_i, a_j} = 0 on 3 spatial orbitals
        n_so = 6
        for i in range(n_so):
            for j in range(n_so):
                ai = FermionOperator(n_so); ai.add(((i, False),), 1.0)
                aj = FermionOperator(n_so); aj.add(((j, False),), 1.0)
                adj = FermionOperator(n_so); adj.add(((j, True),), 1.0)
                qi, qj, qdj = (jordan_wigner(x) for x in (ai, aj, adj))
                anti1 = (qi * qdj + qdj * qi).simplify()
                expected = {} if i != j else {PauliString.identity(n_so): 1.0}
                assert dict(anti1.terms) == pytest.approx(expected)
                anti2 = (qi * qj + qj * qi).simplify()
                assert anti2.terms == {}

    def test_hermitian_input_gives_real_coefficients(self):
        rng = np.random.default_rng(4)
        h1, g = random_integrals(rng, 2)
        H = jordan_wigner(build_hamiltonian(h1, g, 0.1))
        assert H.is_hermitian()


class TestHfReference:
    def test_examples(self):
        assert hf_reference(2, 4) == 0b0101
        assert hf_reference(6, 14) == (1 << 0) + (1 << 1) + (1 << 2) + (1 << 7) + (1 << 8) + (1 << 9)
        assert hf_reference(3, 8) == (1 << 0) + (1 << 1) + (1 << 4)

    def test_too_many_electrons(self):
        with pytest.raises(ValueError):
            hf_reference(5, 4)

    def test_expectation_matches_determinant_energy(self):
        from vqepes.simulator import expectation, prepare_reference
        rng = np.random.default_rng(5)
        for n_elec in (2, 3, 4):
            h1, g = random_integrals(rng, 3)
            H = jordan_wigner(build_hamiltonian(h1, g, 0.7))
            state = prepare_reference(hf_reference(n_elec, 6), 6)
            e_q = expectation(state, H)
            e_det = determinant_energy(h1, g, 0.7, n_elec)
            assert e_q == pytest.approx(e_det, abs=1e-9)

    def test_fixture_hf_energy_invariance(self):
        # <HF|H|HF> from the JW operator matches the sidecar HF energy
        from vqepes.simulator import expectation, prepare_reference
        for sub in ("h2", "mgh2o_67"):
            files = sorted((FIXTURES / sub).glob("*_d1.*0.fcidump"))[:2]
            for path in files:
                data = parse_fcidump(path.read_text())
                meta = read_sidecar(path.with_suffix(".meta").read_text())
                H = jordan_wigner(build_hamiltonian(data.h1, data.h2, data.e_core))
                state = prepare_reference(hf_reference(data.n_elec, 2 * data.n_orb), 2 * data.n_orb)
                assert expectation(state, H) == pytest.approx(float(meta["hf_energy_ha"]), abs=1e-8)


class TestSidecar:
    def test_read(self):
        text = (
            "system = H2\ndistance_angstrom = 0.9\nhf_energy_ha = -1.09\n"
            "active_space = 2,2\nordering = blocked-alpha-beta\n"
        )
        meta = read_sidecar(text)
        assert meta["system"] == "H2"
        assert meta["ordering"] == "blocked-alpha-beta"

    def test_missing_key(self):
        with pytest.raises(ValueError, match="missing keys"):
            read_sidecar("system = H2\n")

    def test_fixture_sidecars_carry_exact_keys(self):
        for sub in ("h2", "mgh2o_67", "mgh2o_44"):
            metas = sorted((FIXTURES / sub).glob("*.meta"))
            assert metas, f"no sidecars in {sub}"
            meta = read_sidecar(metas[0].read_text())
            for key in ("system", "distance_angstrom", "hf_energy_ha", "active_space", "ordering"):
                assert key in meta
