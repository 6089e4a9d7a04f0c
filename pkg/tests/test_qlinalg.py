import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import rand_q
from oracles import adjoint, qmatmul_loop
from qtlr.errors import NumericalFailure, ShapeMismatch
from qtlr.qlinalg import (
    complex_adjoint,
    conj_transpose,
    from_complex_adjoint,
    is_unitary,
    nuclear_norm,
    qeye,
    qmatmul,
    qsvd,
    singular_values,
    unitarity_error,
)
from qtlr.quaternion import QTensor, fro_norm

dims = st.integers(1, 9)


def rel_err(A, B):
    return fro_norm(A - B) / max(fro_norm(B), 1e-300)


class TestAdjoint:
    def test_real_scalar(self):
        C = complex_adjoint(QTensor.real(np.array([[2.0]])))
        assert np.array_equal(C, np.array([[2, 0], [0, 2]]))

    def test_unit_j(self):
        C = complex_adjoint(QTensor.from_parts(y=np.array([[1.0]])))
        assert np.array_equal(C, np.array([[0, 1], [-1, 0]]))

    def test_inverse_map(self):
        A = rand_q((3, 4))
        assert np.array_equal(from_complex_adjoint(complex_adjoint(A)).data, A.data)

    def test_homomorphism(self):
        P, Q = rand_q((3, 3), 1), rand_q((3, 3), 2)
        lhs = complex_adjoint(qmatmul(P, Q))
        assert np.abs(lhs - complex_adjoint(P) @ complex_adjoint(Q)).max() <= 1e-12

    def test_conj_transpose_commutes(self):
        A = rand_q((3, 5), 3)
        assert np.abs(complex_adjoint(conj_transpose(A)) - complex_adjoint(A).conj().T).max() == 0


class TestQmatmul:
    def test_identity(self):
        P = rand_q((3, 4))
        assert np.allclose(qmatmul(P, qeye(4)).data, P.data, atol=0)

    def test_unit_matrices(self):
        iI = QTensor.from_parts(x=np.eye(2))
        jI = QTensor.from_parts(y=np.eye(2))
        assert np.array_equal(qmatmul(iI, jI).data, QTensor.from_parts(z=np.eye(2)).data)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            qmatmul(rand_q((2, 3)), rand_q((2, 3)))

    @given(dims, dims, dims, st.integers(0, 10**6))
    def test_matches_loop(self, m, k, n, seed):
        P, Q = rand_q((m, k), seed), rand_q((k, n), seed + 1)
        assert np.allclose(qmatmul(P, Q).data, qmatmul_loop(P.data, Q.data), atol=1e-12)

    def test_batched_slices(self):
        P, Q = rand_q((2, 3, 4), 1), rand_q((3, 2, 4), 2)
        R = qmatmul(P, Q)
        for t in range(4):
            assert np.allclose(R.data[..., t], qmatmul_loop(P.data[..., t], Q.data[..., t]), atol=1e-12)


class TestQSVD:
    def test_real_diagonal(self):
        r = qsvd(QTensor.real(np.diag([3.0, 1.0])))
        assert np.allclose(r.S, [3, 1], atol=1e-14)
        assert np.allclose(np.abs(r.U.data[0]), np.eye(2), atol=1e-14)

    def test_i_times_identity(self):
        r = qsvd(QTensor.from_parts(x=np.eye(2)))
        assert np.allclose(r.S, [1, 1], atol=1e-14)
        assert rel_err(r.reconstruct(), QTensor.from_parts(x=np.eye(2))) <= 1e-14

    def test_zero_matrix(self):
        r = qsvd(QTensor.zeros((3, 2)))
        assert np.array_equal(r.S, [0, 0])
        assert is_unitary(r.U, 1e-12) and is_unitary(r.V, 1e-12)

    def test_adjoint_values_pair_up(self):
        sc = np.linalg.svd(adjoint(rand_q((4, 3), 9).data), compute_uv=False)
        assert np.abs(sc[0::2] - sc[1::2]).max() <= 1e-9

    @given(dims, dims, st.integers(0, 10**6))
    def test_reconstruction_and_unitarity(self, m, n, seed):
        Q = rand_q((m, n), seed)
        r = qsvd(Q)
        assert r.U.shape == (m, m) and r.V.shape == (n, n)
        assert r.S.shape == (min(m, n),)
        assert np.all(np.diff(r.S) <= 1e-12) and np.all(r.S >= 0)
        assert rel_err(r.reconstruct(), Q) <= 1e-10
        assert unitarity_error(r.U) <= 1e-10
        assert unitarity_error(r.V) <= 1e-10

    @given(st.integers(2, 8), st.integers(2, 8), st.integers(1, 3), st.integers(0, 10**6))
    def test_rank_deficient(self, m, n, r, seed):
        r = min(r, m, n)
        Q = qmatmul(rand_q((m, r), seed), rand_q((r, n), seed + 7))
        res = qsvd(Q)
        assert res.rank() == r
        assert rel_err(res.reconstruct(), Q) <= 1e-10
        assert unitarity_error(res.U) <= 1e-10 and unitarity_error(res.V) <= 1e-10

    def test_repeated_singular_values(self):
        Q = QTensor.real(np.ones((4, 5)))
        res = qsvd(Q)
        assert rel_err(res.reconstruct(), Q) <= 1e-12
        assert unitarity_error(res.U) <= 1e-12 and unitarity_error(res.V) <= 1e-12

    def test_economy_shapes(self):
        r = qsvd(rand_q((3, 6)), full_matrices=False)
        assert r.U.shape == (3, 3) and r.V.shape == (6, 3)
        r = qsvd(rand_q((6, 3)), full_matrices=False)
        assert r.U.shape == (6, 3) and r.V.shape == (3, 3)

    def test_nonfinite_input(self):
        bad = QTensor.from_parts(w=np.array([[np.nan, 1.0]]))
        with pytest.raises(NumericalFailure):
            qsvd(bad)

    def test_requires_matrix(self):
        with pytest.raises(ShapeMismatch):
            qsvd(rand_q((2, 2, 2)))

    def test_values_match_transpose(self):
        Q = rand_q((5, 3), 11)
        assert np.allclose(singular_values(Q), singular_values(conj_transpose(Q)), atol=1e-12)


class TestNuclearNormAndUnitarity:
    def test_diag(self):
        assert nuclear_norm(QTensor.real(np.diag([3.0, 1.0]))) == pytest.approx(4.0, abs=1e-14)

    def test_zero(self):
        assert nuclear_norm(QTensor.zeros((3, 3))) == 0.0

    def test_rank_one_scaled(self):
        u = rand_q((4, 1), 1)
        v = rand_q((3, 1), 2)
        u = u / fro_norm(u)
        v = v / fro_norm(v)
        Q = qmatmul(u * 5.0, conj_transpose(v))
        assert nuclear_norm(Q) == pytest.approx(5.0, rel=1e-12)

    def test_is_unitary_examples(self):
        assert is_unitary(qeye(3))
        assert not is_unitary(qeye(3) * 2)
        assert is_unitary(qsvd(rand_q((4, 4), 3)).U, 1e-9)

    def test_is_unitary_needs_square(self):
        with pytest.raises(ShapeMismatch):
            is_unitary(rand_q((2, 3)))

    @given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 10**6))
    def test_unitary_invariance(self, m, n, seed):
        Q = rand_q((m, n), seed)
        W = qsvd(rand_q((m, m), seed + 1)).U
        Z = qsvd(rand_q((n, n), seed + 2)).U
        moved = qmatmul(qmatmul(W, Q), conj_transpose(Z))
        assert abs(nuclear_norm(moved) - nuclear_norm(Q)) <= 1e-8
