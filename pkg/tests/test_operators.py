import numpy as np
import pytest
from numpy.testing import assert_allclose

from proxpoint import (
    DenseLinearOperator,
    Preconditioner,
    QuadraticSaddle,
    SingularSystemError,
    check_monotone,
    linear_resolvent,
    preconditioned_resolvent,
    resolvent_linear,
    saddle_resolvent,
    strongly_monotone_toy,
    yosida,
    yosida_apply,
)
from conftest import random_monotone_operator

ROTATION = [[0.0, 1.0], [-1.0, 0.0]]


class TestResolvent:
    def test_rotation_hand_solve(self):
        # (I + M)^{-1} = [[1, -1], [1, 1]] / 2
        assert_allclose(resolvent_linear(ROTATION, 1.0, [1.0, 0.0]), [0.5, 0.5])

    def test_zero_operator_is_identity(self):
        assert_allclose(resolvent_linear(np.zeros((2, 2)), 3.7, [3.0, -2.0]),
                        [3.0, -2.0])

    def test_scalar_strongly_monotone(self):
        assert_allclose(resolvent_linear([[0.02]], 1.0, [1.02]), [1.0], rtol=1e-14)

    def test_residual_of_solve(self, rng):
        op = random_monotone_operator(rng, 7)
        lam = 0.8
        y = rng.normals(7)
        x = resolvent_linear(op, lam, y)
        residual = np.linalg.norm((np.eye(7) + lam * op.entries) @ x - y)
        assert residual <= 1e-12 * np.linalg.norm(y)

    def test_rejects_nonpositive_lambda(self):
        with pytest.raises(ValueError):
            linear_resolvent(ROTATION, 0.0)
        with pytest.raises(ValueError):
            linear_resolvent(ROTATION, -1.0)

    def test_singular_system_raises(self):
        # M = -I makes I + M singular (non-monotone input).
        with pytest.raises(SingularSystemError):
            resolvent_linear(-np.eye(3), 1.0, np.ones(3))

    def test_firm_nonexpansiveness(self, rng):
        for _ in range(100):
            op = random_monotone_operator(rng, 4)
            resolvent = linear_resolvent(op, 0.5 + rng.uniforms(1)[0])
            y1, y2 = rng.normals(4), rng.normals(4)
            d = resolvent(y1) - resolvent(y2)
            assert d @ (y1 - y2) >= d @ d - 1e-10


class TestPreconditionedResolvent:
    def test_identity_preconditioner_matches_plain(self, rng):
        op = random_monotone_operator(rng, 5)
        y = rng.normals(5)
        assert_allclose(preconditioned_resolvent(op, np.eye(5), 0.9, y),
                        resolvent_linear(op, 0.9, y), rtol=1e-13)

    def test_zero_operator_returns_input(self):
        p = [[2.0, -1.0], [-1.0, 2.0]]
        assert_allclose(preconditioned_resolvent(np.zeros((2, 2)), p, 1.0, [1.0, 1.0]),
                        [1.0, 1.0], rtol=1e-14)

    def test_hand_solve(self):
        # (P + M) = [[2, 0], [-2, 2]], P y = [2, -1] -> x = [1, 0.5]
        p = [[2.0, -1.0], [-1.0, 2.0]]
        assert_allclose(preconditioned_resolvent(ROTATION, p, 1.0, [1.0, 0.0]),
                        [1.0, 0.5], rtol=1e-14)

    def test_preconditioner_validation(self):
        with pytest.raises(ValueError):
            Preconditioner([[1.0, 0.5], [0.4, 1.0]])  # not symmetric
        with pytest.raises(ValueError):
            Preconditioner([[1.0, 0.0], [0.0, -0.1]])  # not PD


class TestSaddleResolvent:
    def test_zero_saddle_returns_input(self):
        phi = QuadraticSaddle(np.zeros((2, 2)), np.zeros((3, 2)), np.zeros((3, 3)))
        u, v = saddle_resolvent(phi, 2.0, [1.0, -1.0], [0.0, 2.0, 3.0])
        assert_allclose(u, [1.0, -1.0])
        assert_allclose(v, [0.0, 2.0, 3.0])

    def test_scalar_bilinear_hand_solve(self):
        phi = QuadraticSaddle([[0.0]], [[1.0]], [[0.0]])
        u, v = saddle_resolvent(phi, 1.0, [1.0], [0.0])
        assert_allclose(u, [0.5])
        assert_allclose(v, [0.5])

    def test_matches_equivalent_linear_operator(self):
        # The toy saddle's subdifferential is exactly the 2x2 toy operator.
        phi = QuadraticSaddle([[0.02]], [[1.0 / np.sqrt(99.0)]], [[0.02]])
        op = strongly_monotone_toy(100, 1.0, 0.02)
        u, v = saddle_resolvent(phi, 1.0, [1.0], [0.0])
        assert_allclose(np.array([u[0], v[0]]),
                        resolvent_linear(op, 1.0, [1.0, 0.0]), rtol=1e-14)

    def test_agrees_with_stacked_resolvent(self, rng):
        b1 = rng.normal_matrix(3, 3)
        b2 = rng.normal_matrix(2, 2)
        phi = QuadraticSaddle(b1 @ b1.T, rng.normal_matrix(2, 3), b2 @ b2.T,
                              a=rng.normals(3), b=rng.normals(2))
        linear, shift = phi.stacked_operator()
        lam = 0.6
        u_hat, v_hat = rng.normals(3), rng.normals(2)
        y = np.concatenate([u_hat, v_hat])
        expected = resolvent_linear(linear, lam, y - lam * shift)
        u, v = saddle_resolvent(phi, lam, u_hat, v_hat)
        assert np.max(np.abs(np.concatenate([u, v]) - expected)) <= 1e-10

    def test_requires_psd_blocks(self):
        with pytest.raises(ValueError):
            QuadraticSaddle([[-1.0]], [[1.0]], [[0.0]])


class TestYosida:
    def test_zero_operator_gives_zero(self):
        resolvent = linear_resolvent(np.zeros((3, 3)), 2.0)
        assert_allclose(yosida_apply(resolvent, 2.0, [1.0, -2.0, 3.0]), np.zeros(3))

    def test_rotation_value(self):
        resolvent = linear_resolvent(ROTATION, 1.0)
        assert_allclose(yosida_apply(resolvent, 1.0, [1.0, 0.0]), [0.5, -0.5])

    def test_scalar_value(self):
        resolvent = linear_resolvent([[0.02]], 1.0)
        assert_allclose(yosida_apply(resolvent, 1.0, [1.02]), [0.02], rtol=1e-12)

    def test_identity_and_cocoercivity(self, rng):
        for _ in range(100):
            op = random_monotone_operator(rng, 3)
            lam = 0.5 + rng.uniforms(1)[0]
            resolvent = linear_resolvent(op, lam)
            approx = yosida(resolvent, lam)
            y = rng.normals(3)
            assert np.linalg.norm(resolvent(y) - (y - lam * approx(y))) <= 1e-12
            y1, y2 = rng.normals(3), rng.normals(3)
            d = approx(y1) - approx(y2)
            assert (y1 - y2) @ d >= lam * (d @ d) - 1e-10


class TestCheckMonotone:
    def test_skew_is_monotone(self):
        report = check_monotone(DenseLinearOperator(ROTATION))
        assert report
        assert report.min_eigenvalue == pytest.approx(0.0, abs=1e-14)

    def test_toy_modulus_is_exactly_mu(self):
        op = strongly_monotone_toy(100, 1.0, 0.02)
        assert check_monotone(op, mu=0.02)
        assert not check_monotone(op, mu=0.021)

    def test_negative_definite_fails(self):
        assert not check_monotone(np.array([[-1.0]]))

    def test_rejects_negative_mu(self):
        with pytest.raises(ValueError):
            check_monotone(np.eye(2), mu=-0.5)
