import numpy as np
import pytest
from numpy.testing import assert_allclose

from proxpoint import (
    StepCoeffs,
    build_constraint_matrices,
    build_h,
    certificate_slack,
    equivalence_check,
    general_ppm,
    linear_resolvent,
    ppm,
    rotation_worst_case,
    verify_certificate,
)
from proxpoint.pep_cert import dual_multipliers
from conftest import random_monotone_operator


class TestBuildH:
    def test_first_row(self):
        assert build_h(2).row(1)[0] == 1.0

    def test_second_row(self):
        row = build_h(3).row(2)
        assert_allclose(row, [-1.0 / 3.0, 4.0 / 3.0], rtol=1e-15)

    def test_rows_sum_to_one(self):
        coeffs = build_h(101)
        for i in range(1, 101):
            assert coeffs.row(i).sum() == pytest.approx(1.0, abs=1e-13)

    def test_small_horizon_rejected(self):
        with pytest.raises(ValueError):
            build_h(1)


class TestConstraintMatrices:
    def test_c_matrix(self):
        mats = build_constraint_matrices(build_h(4), 4)
        expected = np.zeros((5, 5))
        expected[4, 4] = 1.0
        assert_allclose(mats.C, expected)

    def test_hand_expanded_a12(self):
        mats = build_constraint_matrices(build_h(2), 2)
        assert_allclose(mats.A[(1, 2)],
                        [[0.0, -0.5, 0.0], [-0.5, 1.0, 0.0], [0.0, 0.0, 0.0]])

    def test_hand_expanded_b2(self):
        mats = build_constraint_matrices(build_h(2), 2)
        assert_allclose(mats.B[2],
                        [[0.0, 0.5, 0.0], [0.5, 1.0, -0.5], [0.0, -0.5, 0.0]])

    def test_all_matrices_symmetric(self):
        mats = build_constraint_matrices(build_h(6), 6)
        for mat in list(mats.A.values()) + list(mats.B.values()) + [mats.C]:
            assert_allclose(mat, mat.T)

    def test_relaxed_subset(self):
        mats = build_constraint_matrices(build_h(5), 5, relaxed_only=True)
        assert set(mats.A) == {(1, 2), (2, 3), (3, 4), (4, 5)}
        assert set(mats.B) == {5}

    def test_accelerated_trace_gram_data_is_feasible(self, rng):
        # Same feasibility check driven by the certified coefficients on a
        # random monotone operator: validates every A and B matrix against
        # genuine operator data, not just the consecutive pairs.
        n = 7
        coeffs = build_h(n)
        op = random_monotone_operator(rng, 5)
        y0 = rng.normals(5)
        trace = general_ppm(linear_resolvent(op, 0.7), coeffs, y0, n)
        radius = np.linalg.norm(y0)  # x* = 0 for a linear operator
        gs = [(trace.ys[i] - trace.xs[i + 1]) / radius for i in range(n)]
        vecs = gs + [y0 / radius]
        gram = np.array([[a @ b for b in vecs] for a in vecs])
        mats = build_constraint_matrices(coeffs, n)
        for mat in list(mats.A.values()) + list(mats.B.values()):
            assert np.trace(mat @ gram) <= 1e-10
        assert np.trace(mats.C @ gram) <= 1.0 + 1e-12

    def test_ppm_trace_gram_data_is_feasible(self):
        # Feed the Gram data of an actual PPM run into the constraints built
        # for the PPM step choice; every constraint value must be <= 0 and
        # the initial-distance constraint must be active at 1.
        n = 8
        resolvent = linear_resolvent(rotation_worst_case(n, 1.0), 1.0)
        trace = ppm(resolvent, [1.0, 0.0], n)
        gs = [trace.ys[i] - trace.xs[i + 1] for i in range(n)]  # lam = R = 1
        vecs = gs + [trace.ys[0]]  # x* = 0
        gram = np.array([[a @ b for b in vecs] for a in vecs])
        mats = build_constraint_matrices(StepCoeffs.ppm(n), n)
        for mat in list(mats.A.values()) + list(mats.B.values()):
            assert np.trace(mat @ gram) <= 1e-12
        assert np.trace(mats.C @ gram) == pytest.approx(1.0, rel=1e-12)


class TestCertificate:
    def test_hand_summed_slack_n2(self):
        assert_allclose(certificate_slack(2),
                        [[0.0, 0.0, 0.0], [0.0, 1.0, -0.5], [0.0, -0.5, 0.25]])

    def test_slack_symmetric_and_trace_identity(self):
        for n in (2, 7, 31):
            s = certificate_slack(n)
            assert_allclose(s, s.T)
            assert np.trace(s) == pytest.approx(1.0 + 1.0 / n ** 2, rel=1e-12)

    def test_exact_at_n2(self):
        report = verify_certificate(2)
        assert report.max_rank1_deviation == 0.0
        assert report.min_eigenvalue == pytest.approx(0.0, abs=1e-14)
        assert report.dual_value == 0.25

    def test_n10(self):
        report = verify_certificate(10)
        assert report.max_rank1_deviation <= 1e-13
        assert report.dual_value == 0.01
        assert report.passed

    def test_rank1_identity_through_n60(self):
        for n in range(2, 61):
            report = verify_certificate(n)
            assert report.max_rank1_deviation <= 1e-12
            assert report.min_eigenvalue >= -1e-10
            assert report.dual_value == pytest.approx(1.0 / n ** 2, rel=1e-15)
            assert report.passed

    def test_multipliers_nonnegative(self):
        for n in (2, 13, 60):
            a, b_n, c = dual_multipliers(n)
            assert all(v >= 0 for v in a.values())
            assert b_n >= 0 and c >= 0


class TestEquivalence:
    def test_rotation(self):
        resolvent = linear_resolvent(rotation_worst_case(50, 1.0), 1.0)
        assert equivalence_check(resolvent, 50, np.array([1.0, 0.0])) <= 1e-9

    def test_zero_operator(self):
        assert equivalence_check(lambda y: y, 10, np.array([1.0, 2.0])) == 0.0

    def test_random_monotone(self, rng):
        op = random_monotone_operator(rng, 8)
        resolvent = linear_resolvent(op, 1.0)
        assert equivalence_check(resolvent, 100, rng.normals(8)) <= 1e-8
