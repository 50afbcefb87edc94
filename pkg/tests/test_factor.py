from fractions import Fraction

import numpy as np
import pytest

from nopivot import dense, factor, verify
from nopivot.errors import (
    ShapeError,
    SingularMatrixError,
    SingularPivotBlockError,
    ZeroPivotError,
)
from nopivot.instances import hard_matrix
from nopivot.randgen import Seed, gaussian_matrix

RNG = np.random.default_rng


def spd_like(seed, n):
    g = RNG(seed).standard_normal((n, n))
    return g.T @ g + np.eye(n)


def exact_genp_pivots(int_matrix):
    """No-pivoting elimination over exact rationals; None marks a zero pivot."""
    n = len(int_matrix)
    work = [[Fraction(int(v)) for v in row] for row in int_matrix]
    pivots = []
    for k in range(n):
        pivot = work[k][k]
        if pivot == 0:
            return pivots + [None]
        pivots.append(pivot)
        for i in range(k + 1, n):
            ratio = work[i][k] / pivot
            for j in range(k, n):
                work[i][j] -= ratio * work[k][j]
    return pivots


class TestGenp:
    def test_hand_example(self):
        fact, report = factor.genp_factor([[2.0, 1.0], [1.0, 1.0]])
        assert np.allclose(fact.l_factor, [[1.0, 0.0], [0.5, 1.0]])
        assert np.allclose(fact.u_factor, [[2.0, 1.0], [0.0, 0.5]])
        assert report.pivot_magnitudes.tolist() == [2.0, 0.5]

    def test_zero_pivot_failure(self):
        with pytest.raises(ZeroPivotError) as err:
            factor.genp_factor([[0.0, 1.0], [1.0, 0.0]], zero_pivot_threshold=0.0)
        assert err.value.step == 1

    def test_threshold_semantics(self):
        a = np.array([[1e-8, 1.0], [1.0, 1.0]])
        factor.genp_factor(a, zero_pivot_threshold=0.0)  # tiny pivot allowed
        with pytest.raises(ZeroPivotError):
            factor.genp_factor(a, zero_pivot_threshold=1e-6)

    def test_reconstruction(self):
        a = RNG(0).standard_normal((16, 16)) + 4 * np.eye(16)
        fact, _ = factor.genp_factor(a)
        scale = np.linalg.norm(fact.l_factor, 2) * np.linalg.norm(fact.u_factor, 2)
        assert np.linalg.norm(fact.l_factor @ fact.u_factor - a, 2) <= 1e-10 * scale
        assert np.allclose(np.diag(fact.l_factor), 1.0)
        assert np.allclose(fact.l_factor, np.tril(fact.l_factor))
        assert np.allclose(fact.u_factor, np.triu(fact.u_factor))

    def test_record_count_and_growth(self):
        a = spd_like(1, 12)
        _, report = factor.genp_factor(a)
        assert len(report.records) == 12
        assert report.growth_factor >= 1.0

    def test_hard_matrix_completes_but_corrupts(self):
        # Singular leading half block: factorization runs to completion yet
        # the downstream solve is useless.
        inst = hard_matrix(Seed(100).derive("i", 0), 64, 4)
        fact, report = factor.genp_factor(inst.matrix)
        assert len(report.records) == 64
        x = factor.lu_solve(fact, inst.rhs)
        residual = np.linalg.norm(inst.matrix @ x - inst.rhs) / np.linalg.norm(inst.rhs)
        assert residual >= 10.0

    def test_spectral_monitor_records(self):
        a = spd_like(2, 8)
        _, report = factor.genp_factor(a, monitor="spectral")
        assert report.monitor == "spectral"
        assert all(r.complement_norm is not None for r in report.records[:-1])
        assert report.records[-1].complement_norm is None


class TestGepp:
    def test_swap_example(self):
        fact = factor.gepp_factor([[0.0, 1.0], [1.0, 0.0]])
        assert fact.permutation.tolist() == [1, 0]
        assert np.allclose(fact.l_factor, np.eye(2))
        assert np.allclose(fact.u_factor, np.eye(2))

    def test_diagonal_identity_permutation(self):
        fact = factor.gepp_factor(np.diag([1.0, 2.0, 3.0, 4.0]))
        assert fact.permutation.tolist() == [0, 1, 2, 3]

    def test_multipliers_bounded(self):
        a = RNG(3).standard_normal((20, 20))
        fact = factor.gepp_factor(a)
        assert np.max(np.abs(fact.l_factor)) <= 1.0 + 1e-14
        assert np.linalg.norm(fact.l_factor @ fact.u_factor - a[fact.permutation], 2) <= 1e-10 * (
            np.linalg.norm(fact.l_factor, 2) * np.linalg.norm(fact.u_factor, 2)
        )

    def test_hard_matrix_accurate(self):
        inst = hard_matrix(Seed(100).derive("i", 0), 64, 4)
        x = factor.lu_solve(factor.gepp_factor(inst.matrix), inst.rhs)
        residual = np.linalg.norm(inst.matrix @ x - inst.rhs)
        assert residual <= 1e-11

    def test_singular_failure(self):
        with pytest.raises(SingularMatrixError):
            factor.gepp_factor(np.zeros((3, 3)))


class TestLuSolve:
    def test_identity(self):
        fact, _ = factor.genp_factor(np.eye(4))
        b = RNG(4).standard_normal(4)
        assert np.array_equal(factor.lu_solve(fact, b), b)

    def test_hand_solve(self):
        fact, _ = factor.genp_factor([[2.0, 1.0], [1.0, 1.0]])
        assert np.allclose(factor.lu_solve(fact, np.array([3.0, 2.0])), [1.0, 1.0])

    def test_residual_oracle(self):
        a = spd_like(5, 32)
        b = RNG(6).standard_normal(32)
        x = factor.lu_solve(factor.gepp_factor(a), b)
        assert np.linalg.norm(a @ x - b) <= 1e-12 * np.linalg.norm(a, 2) * np.linalg.norm(x)

    def test_matrix_rhs(self):
        a = spd_like(7, 8)
        rhs = RNG(8).standard_normal((8, 3))
        x = factor.lu_solve(factor.gepp_factor(a), rhs)
        assert np.linalg.norm(a @ x - rhs) <= 1e-10

    def test_zero_diagonal(self):
        fact = factor.GenpFactorization(np.eye(2), np.array([[1.0, 0.0], [0.0, 0.0]]))
        with pytest.raises(SingularMatrixError):
            factor.lu_solve(fact, np.ones(2))

    def test_dimension_mismatch(self):
        fact, _ = factor.genp_factor(np.eye(3))
        with pytest.raises(ShapeError):
            factor.lu_solve(fact, np.ones(4))

    def test_transpose_solve(self):
        a = RNG(9).standard_normal((10, 10)) + 3 * np.eye(10)
        fact = factor.gepp_factor(a)
        b = RNG(10).standard_normal(10)
        x = factor.gepp_solve_transpose(fact, b)
        assert np.linalg.norm(a.T @ x - b) <= 1e-10 * np.linalg.norm(x)


class TestSchurComplement:
    def test_block_diagonal(self):
        b = RNG(11).standard_normal((3, 3)) + 3 * np.eye(3)
        e = RNG(12).standard_normal((2, 2))
        a = np.block([[b, np.zeros((3, 2))], [np.zeros((2, 3)), e]])
        assert np.allclose(factor.schur_complement(a, 3), e)

    def test_hand_example(self):
        assert np.allclose(factor.schur_complement([[2.0, 1.0], [1.0, 1.0]], 1), [[0.5]])

    def test_nesting_identity(self):
        # S(A^(h), A^(k)) equals the leading (k-h) block of S(A^(h), A).
        a = spd_like(13, 12)
        h, k = 3, 7
        inner = factor.schur_complement(a[:k, :k], h)
        outer = factor.schur_complement(a, h)[: k - h, : k - h]
        assert np.linalg.norm(inner - outer) <= 1e-10 * np.linalg.norm(outer)

    def test_singular_pivot_block(self):
        with pytest.raises(SingularPivotBlockError):
            factor.schur_complement([[0.0, 1.0], [1.0, 0.0]], 1)

    def test_full_size_is_empty(self):
        assert factor.schur_complement(np.eye(3), 3).shape == (0, 0)


class TestBlockFactorization:
    def test_single_block_trivial(self):
        a = spd_like(14, 6)
        fact, report = factor.block_genp_factor(a, (6,))
        assert len(fact.steps) == 1
        assert fact.steps[0].row_mult.shape == (6, 0)
        assert report.records[0].complement_norm is None
        assert np.linalg.norm(fact.reconstruct() - a) <= 1e-10 * np.linalg.norm(a)

    def test_scalar_schedule_hand_example(self):
        fact, _ = factor.block_genp_factor([[2.0, 1.0], [1.0, 1.0]], (1, 1), record_complements=True)
        assert np.allclose(fact.schur_complements[1], [[0.5]])

    def test_schedule_invariance(self):
        # Any two schedules with a common prefix sum produce the same complement.
        a = spd_like(15, 16)
        _, _ = factor.genp_factor(a)
        fine, _ = factor.block_genp_factor(a, (1,) * 16, record_complements=True)
        coarse, _ = factor.block_genp_factor(a, (4, 4, 4, 4), record_complements=True)
        s_fine = fine.schur_complements[8]
        s_coarse = coarse.schur_complements[8]
        assert np.linalg.norm(s_fine - s_coarse) <= 1e-10 * np.linalg.norm(s_fine)
        direct = factor.schur_complement(a, 8)
        assert np.linalg.norm(s_fine - direct) <= 1e-10 * np.linalg.norm(direct)

    def test_reconstruction_bound(self):
        a = RNG(16).standard_normal((12, 12)) + 4 * np.eye(12)
        fact, report = factor.block_genp_factor(a, (3, 5, 4))
        tol = 1e-9 * np.linalg.norm(a, 2) * (1.0 + report.growth_factor)
        assert np.linalg.norm(fact.reconstruct() - a, 2) <= tol

    def test_solve_matches_gepp(self):
        a = spd_like(17, 12)
        b = RNG(18).standard_normal(12)
        fact, _ = factor.block_genp_factor(a, (4, 4, 4))
        x = factor.lu_solve(fact, b)
        x_ref = factor.lu_solve(factor.gepp_factor(a), b)
        assert np.linalg.norm(x - x_ref) <= 1e-9 * np.linalg.norm(x_ref)

    def test_singular_pivot_block_failure(self):
        inst = hard_matrix(Seed(100).derive("i", 1), 16, 4)
        with pytest.raises(SingularPivotBlockError) as err:
            factor.block_genp_factor(inst.matrix, (8, 8))
        assert err.value.step == 1

    def test_schedule_validation(self):
        with pytest.raises(ShapeError):
            factor.block_genp_factor(np.eye(4), (3, 3))
        with pytest.raises(ShapeError):
            factor.BlockSchedule((0, 4))

    def test_block_inversion_identity(self):
        # Inverting the three block factors reproduces the dense inverse.
        a = spd_like(19, 8)
        k = 4
        b = a[:k, :k]
        c = a[:k, k:]
        d = a[k:, :k]
        s = factor.schur_complement(a, k)
        b_inv = np.linalg.inv(b)
        s_inv = np.linalg.inv(s)
        upper = np.block([[np.eye(k), -b_inv @ c], [np.zeros((k, k)), np.eye(k)]])
        middle = np.block([[b_inv, np.zeros((k, k))], [np.zeros((k, k)), s_inv]])
        lower = np.block([[np.eye(k), np.zeros((k, k))], [-d @ b_inv, np.eye(k)]])
        assembled = upper @ middle @ lower
        reference = np.linalg.inv(a)
        assert np.linalg.norm(assembled - reference) <= 1e-8 * np.linalg.norm(reference)


class TestDeterminant:
    def test_parity(self):
        assert factor.determinant(np.array([[0.0, 1.0], [1.0, 0.0]])) == pytest.approx(-1.0)

    def test_det_product_identity(self):
        # det A = det B * det S over random instances.
        rng = RNG(20)
        for _ in range(25):
            a = rng.standard_normal((8, 8)) + 3 * np.eye(8)
            k = int(rng.integers(1, 8))
            det_a = factor.determinant(a)
            det_b = factor.determinant(a[:k, :k])
            det_s = factor.determinant(factor.schur_complement(a, k))
            assert det_a == pytest.approx(det_b * det_s, rel=1e-8)

    def test_exact_shadow_iff_minors(self):
        # GENP admits threshold-zero completion over the rationals exactly
        # when every leading minor is nonzero (checked with exact integers).
        rng = RNG(21)
        seen_failure = False
        for _ in range(60):
            m = rng.integers(-3, 4, size=(4, 4))
            minors = verify.leading_principal_minors_int(m)
            pivots = exact_genp_pivots(m)
            clean = all(v != 0 for v in minors)
            assert clean == (None not in pivots)
            if clean:
                # Exact pivots are the ratios of consecutive leading minors.
                for j, pivot in enumerate(pivots):
                    prev = 1 if j == 0 else minors[j - 1]
                    assert pivot == Fraction(minors[j], prev)
            else:
                seen_failure = True
        assert seen_failure  # the sweep must exercise both branches


class TestSafety:
    def test_identity_matrix(self):
        a = np.eye(4)
        _, report = factor.genp_factor(a, monitor="spectral")
        result = factor.safety_check(a, report)
        assert result.strongly_nonsingular
        assert result.verdict is True
        assert result.input_norm == pytest.approx(1.0)
        assert result.max_inverse_norm == pytest.approx(1.0)
        assert result.pivot_bound == pytest.approx(2.0)
        assert np.allclose(report.pivot_magnitudes, 1.0)

    def test_spd_like_passes(self):
        a = spd_like(22, 16)
        _, report = factor.genp_factor(a, monitor="spectral")
        result = factor.safety_check(a, report)
        assert result.verdict is True
        assert result.growth_factor <= result.growth_bound
        assert result.gepp_growth_bound == 2.0 ** 15

    def test_block_report_passes(self):
        a = spd_like(23, 16)
        _, report = factor.block_genp_factor(a, (4, 4, 4, 4), monitor="spectral")
        result = factor.safety_check(a, report)
        assert result.verdict is True
        assert all(r.complement_inverse_norm is not None for r in report.records[:-1])

    def test_hard_matrix_not_strongly_nonsingular(self):
        inst = hard_matrix(Seed(100).derive("i", 2), 64, 4)
        _, report = factor.genp_factor(inst.matrix)
        result = factor.safety_check(inst.matrix, report)
        assert not result.strongly_nonsingular
        assert result.verdict is None
        assert result.singular_block is not None
        assert 28 < result.singular_block <= 32

    def test_norm_product_at_least_one(self):
        a = spd_like(24, 8)
        _, report = factor.genp_factor(a, monitor="spectral")
        result = factor.safety_check(a, report)
        assert result.max_inverse_norm * result.input_norm >= 1.0 - 1e-10


class TestInverseNormEstimate:
    def test_matches_jacobi(self):
        a = RNG(25).standard_normal((24, 24)) + 2 * np.eye(24)
        exact = dense.inverse_norm(a)
        assert factor.inverse_norm_estimate(a) == pytest.approx(exact, rel=1e-3)

    def test_large_path(self):
        a = gaussian_matrix(Seed(26), 200, 200) + 10 * np.eye(200)
        expected = 1.0 / np.linalg.svd(a, compute_uv=False)[-1]
        assert factor.inverse_norm_estimate(a) == pytest.approx(expected, rel=1e-3)
