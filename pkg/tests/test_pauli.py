import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vqepes.pauli import PauliString, QubitOperator, commutes, multiply, simplify


def random_string(rng, n):
    return PauliString(n, int(rng.integers(0, 1 << n)), int(rng.integers(0, 1 << n)))


class TestMultiply:
    def test_single_qubit_group_relations(self):
        x = PauliString.from_label("X")
        y = PauliString.from_label("Y")
        z = PauliString.from_label("Z")
        assert multiply(x, y) == (z, 1j)
        assert multiply(y, x) == (z, -1j)
        assert multiply(z, z) == (PauliString.identity(1), 1.0)

    def test_two_qubit_example_against_dense_product(self):
        p = PauliString.from_label("XZ")
        q = PauliString.from_label("YY")
        r, phase = multiply(p, q)
        assert r.label() == "ZX"
        assert phase == 1.0
        np.testing.assert_allclose(p.to_matrix() @ q.to_matrix(), phase * r.to_matrix())

    def test_qubit_count_mismatch(self):
        with pytest.raises(ValueError):
            multiply(PauliString.from_label("X"), PauliString.from_label("XX"))

    def test_random_products_match_dense_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(300):
            n = int(rng.integers(1, 7))
            p, q = random_string(rng, n), random_string(rng, n)
            r, phase = multiply(p, q)
            np.testing.assert_allclose(
                p.to_matrix() @ q.to_matrix(), phase * r.to_matrix(), atol=0
            )


class TestCommutes:
    def test_anticommuting_pair(self):
        assert not commutes(PauliString.from_label("X"), PauliString.from_label("Z"))

    def test_two_sign_flips_cancel(self):
        assert commutes(PauliString.from_label("XX"), PauliString.from_label("ZZ"))

    def test_partial_overlap(self):
        assert not commutes(PauliString.from_label("XI"), PauliString.from_label("ZZ"))

    def test_matches_dense_commutator(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            n = int(rng.integers(1, 6))
            p, q = random_string(rng, n), random_string(rng, n)
            pm, qm = p.to_matrix(), q.to_matrix()
            dense = np.allclose(pm @ qm, qm @ pm)
            assert commutes(p, q) == dense

    def test_consistent_with_product_phases(self):
        # p and q commute exactly when pq and qp give the same string and phase
        rng = np.random.default_rng(13)
        for _ in range(200):
            n = int(rng.integers(1, 8))
            p, q = random_string(rng, n), random_string(rng, n)
            assert commutes(p, q) == (multiply(p, q) == multiply(q, p))


class TestYParity:
    def test_examples(self):
        assert PauliString.from_label("YII").y_parity() == "odd"
        assert PauliString.from_label("XYY").y_parity() == "even"
        assert PauliString.identity(3).y_parity() == "even"


class TestSimplify:
    def test_duplicate_insertion_merges(self):
        op = QubitOperator(1)
        op.add_term(PauliString.from_label("X"), 1.0)
        op.add_term(PauliString.from_label("X"), 2.0)
        out = simplify(op)
        assert out.terms == {PauliString.from_label("X"): 3.0}

    def test_below_threshold_dropped(self):
        op = QubitOperator.from_term(PauliString.from_label("Z"), 1e-15)
        assert simplify(op).terms == {}

    def test_canonical_form_independent_of_insertion_order(self):
        rng = np.random.default_rng(3)
        strings = [random_string(rng, 3) for _ in range(8)]
        coeffs = rng.normal(size=8) + 1j * rng.normal(size=8)
        a = QubitOperator(3)
        for p, c in zip(strings, coeffs):
            a.add_term(p, c)
        b = QubitOperator(3)
        for p, c in reversed(list(zip(strings, coeffs))):
            b.add_term(p, c)
        sa, sb = a.simplify(), b.simplify()
        assert list(sa.terms) == list(sb.terms)
        np.testing.assert_allclose(list(sa.terms.values()), list(sb.terms.values()))
        np.testing.assert_allclose(sa.to_matrix(), a.to_matrix(), atol=1e-14)

    def test_idempotent(self):
        rng = np.random.default_rng(5)
        op = QubitOperator(4)
        for _ in range(10):
            op.add_term(random_string(rng, 4), rng.normal())
        once = op.simplify()
        twice = once.simplify()
        assert once.terms == twice.terms


class TestToMatrix:
    def test_z_is_diag(self):
        op = QubitOperator.from_term(PauliString.from_label("Z"), 1.0)
        np.testing.assert_allclose(op.to_matrix(), np.diag([1.0, -1.0]))

    def test_identity_scaling(self):
        op = QubitOperator.identity(3, 2.5)
        np.testing.assert_allclose(op.to_matrix(), 2.5 * np.eye(8))

    def test_hopping_block(self):
        # 0.5*(XX + YY) couples |01> and |10> with amplitude 1
        op = QubitOperator(2)
        op.add_term(PauliString.from_label("XX"), 0.5)
        op.add_term(PauliString.from_label("YY"), 0.5)
        m = op.to_matrix()
        expected = np.zeros((4, 4))
        expected[1, 2] = expected[2, 1] = 1.0
        np.testing.assert_allclose(m, expected)

    def test_size_guard(self):
        with pytest.raises(ValueError):
            QubitOperator.identity(13).to_matrix()


class TestTextFormat:
    def test_render(self):
        op = QubitOperator.from_term(PauliString.from_label("XIYZ"), 1.5)
        assert str(op) == "1.5 * XIYZ"

    def test_round_trip(self):
        rng = np.random.default_rng(17)
        op = QubitOperator(4)
        for _ in range(6):
            op.add_term(random_string(rng, 4), complex(rng.normal(), rng.normal()))
        parsed = QubitOperator.parse(str(op))
        diff = (op.simplify() - parsed).simplify(cutoff=1e-9)
        assert diff.terms == {}

    def test_label_round_trip(self):
        rng = np.random.default_rng(19)
        for _ in range(50):
            p = random_string(rng, 6)
            assert PauliString.from_label(p.label()) == p


@given(
    st.integers(min_value=1, max_value=8).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.integers(0, 2**n - 1),
            st.integers(0, 2**n - 1),
            st.integers(0, 2**n - 1),
            st.integers(0, 2**n - 1),
        )
    )
)
@settings(max_examples=60, deadline=None)
def test_property_group_closure(args):
    n, xp, zp, xq, zq = args
    p, q = PauliString(n, xp, zp), PauliString(n, xq, zq)
    r, phase = multiply(p, q)
    assert abs(phase) == 1.0
    np.testing.assert_allclose(p.to_matrix() @ q.to_matrix(), phase * r.to_matrix())
