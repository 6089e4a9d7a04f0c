import numpy as np
import pytest

from conftest import rand_q
from qtlr.errors import DomainError, ShapeMismatch
from qtlr.quaternion import fro_norm
from qtlr.transforms import TransformSet, apply, forward, inverse, make_dct, make_random_orthogonal


def dct_formula(n):
    # entry (p, q), 1-based: c_p cos(pi (2q - 1)(p - 1) / (2n))
    M = np.empty((n, n))
    for p in range(1, n + 1):
        c = np.sqrt(1 / n) if p == 1 else np.sqrt(2 / n)
        for q in range(1, n + 1):
            M[p - 1, q - 1] = c * np.cos(np.pi * (2 * q - 1) * (p - 1) / (2 * n))
    return M


class TestDCT:
    def test_size_one(self):
        assert make_dct(1).tolist() == [[1.0]]

    def test_size_two(self):
        s = 1 / np.sqrt(2)
        assert np.allclose(make_dct(2), [[s, s], [s, -s]], atol=1e-15)

    @pytest.mark.parametrize("n", [3, 5, 8])
    def test_matches_formula(self, n):
        assert np.allclose(make_dct(n), dct_formula(n), atol=1e-14)

    def test_orthonormal(self):
        M = make_dct(8)
        assert np.abs(M.T @ M - np.eye(8)).max() <= 1e-12

    def test_bad_size(self):
        with pytest.raises(DomainError):
            make_dct(0)


class TestRandomOrthogonal:
    def test_deterministic(self):
        assert np.array_equal(make_random_orthogonal(6, 3), make_random_orthogonal(6, 3))
        assert not np.array_equal(make_random_orthogonal(6, 3), make_random_orthogonal(6, 4))

    def test_orthonormal_and_det(self):
        M = make_random_orthogonal(7, 1)
        assert np.abs(M.T @ M - np.eye(7)).max() <= 1e-10
        assert abs(abs(np.linalg.det(M)) - 1) <= 1e-8

    def test_positive_r_diagonal(self):
        M = make_random_orthogonal(5, 2)
        G = np.random.default_rng(2).standard_normal((5, 5))
        R = M.T @ G
        assert np.all(np.diag(R) > 0)


class TestTransformSet:
    @pytest.mark.parametrize("kind", ["identity", "dct", "rand"])
    def test_inverse_pairs(self, kind):
        S = TransformSet.build(kind, (4, 3), seed=5)
        for M, Minv in zip(S.matrices, S.inverses):
            assert np.abs(M @ Minv - np.eye(M.shape[0])).max() <= 1e-12
        assert S.is_orthonormal()

    def test_random_modes_use_distinct_seeds(self):
        S = TransformSet.build("rand", (4, 4), seed=0)
        assert not np.array_equal(S.matrices[0], S.matrices[1])

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            TransformSet.build("fft", (3,))

    def test_user_matrices(self):
        M = np.array([[2.0, 1.0], [0.0, 1.0]])
        S = TransformSet.user([M])
        assert not S.is_orthonormal()
        T = rand_q((3, 3, 2))
        assert fro_norm(inverse(forward(T, S), S) - T) <= 1e-12 * fro_norm(T)

    def test_user_matrices_must_be_square(self):
        with pytest.raises(ShapeMismatch):
            TransformSet.user([np.ones((2, 3))])


class TestApply:
    def test_identity_leaves_tensor(self):
        T = rand_q((4, 5, 6))
        assert np.array_equal(forward(T, TransformSet.for_tensor("identity", T.shape)).data, T.data)

    @pytest.mark.parametrize("kind", ["identity", "dct", "rand"])
    @pytest.mark.parametrize("shape", [(4, 5, 6), (3, 2, 4, 3), (8, 8, 8, 4)])
    def test_roundtrip_and_isometry(self, kind, shape):
        T = rand_q(shape, 1)
        S = TransformSet.for_tensor(kind, shape, seed=9)
        F = forward(T, S)
        assert fro_norm(inverse(F, S) - T) <= 1e-10 * fro_norm(T)
        assert abs(fro_norm(F) - fro_norm(T)) <= 1e-10 * fro_norm(T)

    def test_size_mismatch(self):
        with pytest.raises(ShapeMismatch):
            forward(rand_q((2, 2, 3)), TransformSet.build("dct", (4,)))

    def test_bad_direction(self):
        T = rand_q((2, 2, 3))
        with pytest.raises(DomainError):
            apply(T, TransformSet.for_tensor("dct", T.shape), "sideways")

    def test_dct_acts_on_tubes(self):
        T = rand_q((2, 3, 5), 3)
        F = forward(T, TransformSet.for_tensor("dct", T.shape))
        C = make_dct(5)
        assert np.allclose(F.data, np.einsum("pq,cijq->cijp", C, T.data), atol=1e-13)
