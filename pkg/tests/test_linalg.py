import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import SX, SY, SZ, random_matrix, random_spd
from unimag.linalg import (
    BranchCutError,
    DimensionMismatchError,
    NotHermitianError,
    NotPositiveDefiniteError,
    SingularMatrixError,
    adjoint,
    commutator,
    expm,
    fro_norm,
    inv,
    logm,
    sqrtm_pd,
    unitarity_defect,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def denman_beavers(A, iters=60):
    Y, Z = A.astype(complex), np.eye(A.shape[0], dtype=complex)
    for _ in range(iters):
        Y, Z = 0.5 * (Y + np.linalg.inv(Z)), 0.5 * (Z + np.linalg.inv(Y))
    return Y


class TestAdjoint:
    def test_identity(self):
        assert np.array_equal(adjoint(np.eye(3)), np.eye(3))

    def test_nilpotent(self):
        A = np.array([[0, 1j], [0, 0]])
        assert np.array_equal(adjoint(A), np.array([[0, 0], [-1j, 0]]))

    def test_inner_product(self):
        rng = np.random.default_rng(1)
        A = random_matrix(rng, 4)
        x = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        y = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        assert abs(np.vdot(A @ x, y) - np.vdot(x, adjoint(A) @ y)) < 1e-12

    @given(seeds, st.integers(1, 6))
    def test_involution(self, seed, dim):
        A = random_matrix(np.random.default_rng(seed), dim, 3.0)
        assert np.array_equal(adjoint(adjoint(A)), A)


class TestCommutator:
    def test_self(self):
        A = random_matrix(np.random.default_rng(2), 3)
        assert fro_norm(commutator(A, A)) == 0.0

    def test_pauli(self):
        assert np.allclose(commutator(SX, SY), 2j * SZ, atol=0)

    def test_entrywise(self):
        rng = np.random.default_rng(3)
        A, B = random_matrix(rng, 3), random_matrix(rng, 3)
        ref = np.zeros((3, 3), dtype=complex)
        for i in range(3):
            for j in range(3):
                ref[i, j] = sum(A[i, k] * B[k, j] - B[i, k] * A[k, j] for k in range(3))
        assert fro_norm(commutator(A, B) - ref) < 1e-14

    @given(seeds, st.integers(1, 5))
    def test_antisymmetric(self, seed, dim):
        rng = np.random.default_rng(seed)
        A, B = random_matrix(rng, dim), random_matrix(rng, dim)
        assert np.array_equal(commutator(A, B), -commutator(B, A))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            commutator(np.eye(2), np.eye(3))


class TestExpm:
    def test_zero(self):
        assert np.allclose(expm(np.zeros((3, 3))), np.eye(3), atol=0)

    def test_pauli_rotation(self):
        assert fro_norm(expm(-0.5j * np.pi * SX) - (-1j * SX)) < 1e-14

    @pytest.mark.parametrize("seed", range(5))
    def test_against_eigendecomposition(self, seed):
        rng = np.random.default_rng(seed)
        A = random_matrix(rng, 4, 3.0)
        w, V = np.linalg.eig(A)
        ref = V @ np.diag(np.exp(w)) @ np.linalg.inv(V)
        assert fro_norm(expm(A) - ref) < 1e-9 * max(1.0, fro_norm(ref))

    @given(seeds, st.integers(1, 8), st.floats(0.0, 10.0))
    @settings(max_examples=50)
    def test_anti_hermitian_is_unitary(self, seed, dim, scale):
        M = random_matrix(np.random.default_rng(seed), dim, scale)
        assert unitarity_defect(expm(0.5 * (M - adjoint(M)))) <= 1e-11

    @given(seeds, st.integers(1, 5))
    def test_commuting_sum(self, seed, dim):
        rng = np.random.default_rng(seed)
        M = random_matrix(rng, dim)
        A, B = 0.7 * M + 0.2 * M @ M, -0.3 * M @ M @ M + 0.5 * np.eye(dim)
        lhs, rhs = expm(A + B), expm(A) @ expm(B)
        assert fro_norm(lhs - rhs) <= 1e-10 * fro_norm(lhs)

    @given(seeds, st.integers(1, 5))
    def test_adjoint_commutes(self, seed, dim):
        A = random_matrix(np.random.default_rng(seed), dim, 2.0)
        assert fro_norm(adjoint(expm(A)) - expm(adjoint(A))) <= 1e-12 * max(1.0, fro_norm(expm(A)))

    def test_stack(self):
        rng = np.random.default_rng(4)
        stack = np.stack([random_matrix(rng, 3) for _ in range(4)])
        assert np.allclose(expm(stack), np.stack([expm(m) for m in stack]), atol=1e-15)


class TestLogm:
    def test_identity(self):
        assert fro_norm(logm(np.eye(3))) < 1e-15

    def test_diagonal(self):
        assert fro_norm(logm(np.diag([np.e, np.e**2])) - np.diag([1.0, 2.0])) < 1e-14

    @given(seeds, st.integers(1, 6))
    def test_round_trip(self, seed, dim):
        A = random_matrix(np.random.default_rng(seed), dim, 0.5)
        assert fro_norm(logm(expm(A)) - A) <= 1e-9

    def test_jordan_block_falls_back(self):
        assert fro_norm(logm(np.array([[1.0, 1.0], [0.0, 1.0]])) - np.array([[0, 1], [0, 0]])) < 1e-12

    @pytest.mark.parametrize("diag", [[-1.0, 1.0], [0.0, 2.0]])
    def test_branch_cut(self, diag):
        with pytest.raises(BranchCutError):
            logm(np.diag(diag))


class TestSqrtmPD:
    def test_identity(self):
        assert np.allclose(sqrtm_pd(np.eye(4)), np.eye(4), atol=1e-15)

    def test_diagonal(self):
        assert fro_norm(sqrtm_pd(np.diag([4.0, 9.0])) - np.diag([2.0, 3.0])) < 1e-14

    @pytest.mark.parametrize("seed", range(10))
    def test_squares_back(self, seed):
        A = random_spd(np.random.default_rng(seed), 5)
        S = sqrtm_pd(A)
        assert fro_norm(S @ S - A) <= 1e-10
        assert fro_norm(S - adjoint(S)) == 0.0
        assert np.linalg.eigvalsh(S).min() > 0

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_denman_beavers(self, seed):
        A = random_spd(np.random.default_rng(seed), 4, eps=0.5)
        assert fro_norm(sqrtm_pd(A) - denman_beavers(A)) <= 1e-9

    @pytest.mark.parametrize("seed", range(5))
    def test_inverse_commutes_with_root(self, seed):
        A = random_spd(np.random.default_rng(seed), 4, eps=0.5)
        assert fro_norm(inv(sqrtm_pd(A)) - sqrtm_pd(inv(A))) <= 1e-9

    def test_not_hermitian(self):
        with pytest.raises(NotHermitianError):
            sqrtm_pd(np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_not_positive_definite(self):
        with pytest.raises(NotPositiveDefiniteError) as info:
            sqrtm_pd(np.diag([1.0, -2.0]))
        assert info.value.min_eigenvalue == pytest.approx(-2.0)


class TestInv:
    def test_identity(self):
        assert np.array_equal(inv(np.eye(3)), np.eye(3))

    def test_diagonal(self):
        assert fro_norm(inv(np.diag([2.0, 4.0])) - np.diag([0.5, 0.25])) == 0.0

    @pytest.mark.parametrize("seed", range(5))
    def test_residual(self, seed):
        A = random_matrix(np.random.default_rng(seed), 5) + np.eye(5)
        Ai = inv(A)
        assert fro_norm(A @ Ai - np.eye(5)) <= 1e-10
        assert fro_norm(Ai @ A - np.eye(5)) <= 1e-10

    def test_singular(self):
        with pytest.raises(SingularMatrixError) as info:
            inv(np.array([[1.0, 2.0], [2.0, 4.0]]))
        assert info.value.condition > 1e12

    def test_custom_cap(self):
        with pytest.raises(SingularMatrixError):
            inv(np.diag([1.0, 1e-7]), cap=1e6)


class TestFroNorm:
    def test_values(self):
        assert fro_norm(np.zeros((3, 3))) == 0.0
        assert fro_norm(np.eye(7)) == pytest.approx(np.sqrt(7), abs=1e-15)
        assert fro_norm(np.array([[3.0, 4.0], [0.0, 0.0]])) == 5.0
