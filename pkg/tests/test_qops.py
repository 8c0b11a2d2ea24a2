import math

import numpy as np
import pytest

from seqbell.qops import (
    BlochDirection,
    DensityMatrix,
    IDENTITY_2,
    IDENTITY_4,
    X_AXIS,
    Z_AXIS,
    dir_op,
    expectation,
    hermitian_sqrt,
    is_hermitian,
    is_projector,
    is_psd,
    kron,
    pauli,
    random_density_matrix,
    random_unit_direction,
    sharp_projector,
    singlet,
)

SQRT2 = math.sqrt(2.0)


class TestPauli:
    def test_z_is_diagonal(self):
        np.testing.assert_array_equal(pauli("Z"), np.diag([1.0, -1.0]))

    def test_squares_to_identity(self):
        for axis in "XYZ":
            np.testing.assert_allclose(pauli(axis) @ pauli(axis), IDENTITY_2, atol=1e-15)

    def test_orthogonality(self):
        assert np.trace(pauli("X") @ pauli("Z")) == pytest.approx(0.0)

    def test_unknown_axis_rejected(self):
        with pytest.raises(ValueError):
            pauli("W")


class TestBlochDirection:
    def test_non_unit_rejected(self):
        with pytest.raises(ValueError):
            BlochDirection(0.5, 0.0, 0.0)

    def test_nan_rejected(self):
        with pytest.raises(ValueError):
            BlochDirection(float("nan"), 0.0, 1.0)

    def test_normalized_constructor(self):
        d = BlochDirection.normalized(-1.0, 0.0, -1.0)
        assert d.x == pytest.approx(-1.0 / SQRT2)
        assert d.z == pytest.approx(-1.0 / SQRT2)

    def test_normalized_zero_rejected(self):
        with pytest.raises(ValueError):
            BlochDirection.normalized(0.0, 0.0, 0.0)


class TestDirOp:
    def test_z_axis(self):
        np.testing.assert_array_equal(dir_op(Z_AXIS), np.diag([1.0, -1.0]))

    def test_diagonal_direction_eigenvalues(self):
        d = BlochDirection.normalized(1.0, 0.0, 1.0)
        np.testing.assert_allclose(np.linalg.eigvalsh(dir_op(d)), [-1.0, 1.0], atol=1e-12)

    def test_antipodal_is_negation(self):
        d = BlochDirection.normalized(0.3, -1.2, 0.4)
        np.testing.assert_allclose(dir_op(-d), -dir_op(d), atol=1e-15)

    def test_involution_traceless_hermitian(self, rng):
        for _ in range(100):
            op = dir_op(random_unit_direction(rng))
            assert is_hermitian(op, 1e-12)
            assert abs(np.trace(op)) <= 1e-12
            np.testing.assert_allclose(op @ op, IDENTITY_2, atol=1e-12)


class TestSharpProjector:
    def test_z_plus(self):
        np.testing.assert_allclose(sharp_projector(Z_AXIS, +1), np.diag([1.0, 0.0]), atol=1e-15)

    def test_completeness_random(self, rng):
        for _ in range(20):
            n = random_unit_direction(rng)
            total = sharp_projector(n, +1) + sharp_projector(n, -1)
            np.testing.assert_allclose(total, IDENTITY_2, atol=1e-15)

    def test_idempotence(self, rng):
        for _ in range(20):
            p = sharp_projector(random_unit_direction(rng), -1)
            assert is_projector(p, 1e-12)

    def test_bad_outcome_rejected(self):
        with pytest.raises(ValueError):
            sharp_projector(Z_AXIS, 0)


class TestSinglet:
    def test_zz_anticorrelation(self):
        assert expectation(singlet(), kron(dir_op(Z_AXIS), dir_op(Z_AXIS))) == pytest.approx(-1.0)

    def test_orthogonal_settings(self):
        assert expectation(singlet(), kron(dir_op(X_AXIS), dir_op(Z_AXIS))) == pytest.approx(0.0, abs=1e-14)

    def test_purity(self):
        np.testing.assert_allclose(singlet().eigenvalues(), [0.0, 0.0, 0.0, 1.0], atol=1e-14)

    def test_correlation_rule_random_pairs(self, rng):
        rho = singlet()
        for _ in range(100):
            a = random_unit_direction(rng)
            b = random_unit_direction(rng)
            value = expectation(rho, kron(dir_op(a), dir_op(b)))
            assert abs(value - (-a.dot(b))) <= 1e-10


class TestKron:
    def test_identity(self):
        np.testing.assert_array_equal(kron(IDENTITY_2, IDENTITY_2), IDENTITY_4)

    def test_alice_first_ordering(self):
        # diag(1,-1) on Alice's wing spreads over the two leading slots.
        np.testing.assert_array_equal(
            kron(np.diag([1.0, -1.0]), IDENTITY_2), np.diag([1.0, 1.0, -1.0, -1.0])
        )

    def test_trace_multiplicativity(self, rng):
        for _ in range(10):
            a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            a = (a + a.conj().T) / 2
            b = (b + b.conj().T) / 2
            assert np.trace(kron(a, b)) == pytest.approx(np.trace(a) * np.trace(b))


class TestExpectation:
    def test_identity_trace(self):
        assert expectation(singlet(), IDENTITY_4) == pytest.approx(1.0)

    def test_frozen_cross_setting_value(self):
        # Alice along X, Bob along -(Z+X)/sqrt(2): expectation = -x.y = 1/sqrt(2).
        y1 = BlochDirection.normalized(-1.0, 0.0, -1.0)
        value = expectation(singlet(), kron(dir_op(X_AXIS), dir_op(y1)))
        assert value == pytest.approx(0.7071067811865475, abs=1e-12)
        assert value == pytest.approx(-X_AXIS.dot(y1), abs=1e-12)

    def test_non_hermitian_rejected(self):
        obs = np.zeros((4, 4), dtype=complex)
        obs[0, 1] = 1.0
        with pytest.raises(ValueError):
            expectation(singlet(), obs)


class TestHermitianSqrt:
    def test_identity(self):
        np.testing.assert_allclose(hermitian_sqrt(IDENTITY_2), IDENTITY_2, atol=1e-15)

    def test_diagonal(self):
        np.testing.assert_allclose(hermitian_sqrt(np.diag([4.0, 1.0])), np.diag([2.0, 1.0]), atol=1e-14)

    def test_unsharp_effect_eigenvalues(self):
        # Effect at sharpness 0.6 along Z is diag(0.8, 0.2).
        root = hermitian_sqrt(np.diag([0.8, 0.2]).astype(complex))
        np.testing.assert_allclose(root, np.diag([math.sqrt(0.8), math.sqrt(0.2)]), atol=1e-14)

    def test_random_psd_roundtrip(self, rng):
        for _ in range(200):
            g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            a = g @ g.conj().T
            root = hermitian_sqrt(a)
            assert is_psd(root, 1e-10)
            np.testing.assert_allclose(root @ root, a, atol=1e-12 * max(1.0, np.abs(a).max()))

    def test_zero_matrix(self):
        np.testing.assert_array_equal(hermitian_sqrt(np.zeros((2, 2))), np.zeros((2, 2)))

    def test_negative_eigenvalue_rejected(self):
        with pytest.raises(ValueError):
            hermitian_sqrt(np.diag([1.0, -0.5]))

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValueError):
            hermitian_sqrt(np.array([[1.0, 1.0], [0.0, 1.0]]))


class TestDensityMatrix:
    def test_corrupted_hermiticity_rejected(self):
        bad = singlet().matrix.copy()
        bad[0, 1] = 0.5
        with pytest.raises(ValueError):
            DensityMatrix(bad)

    def test_corrupted_trace_rejected(self):
        with pytest.raises(ValueError):
            DensityMatrix(singlet().matrix * 1.5)

    def test_negative_eigenvalue_rejected(self):
        with pytest.raises(ValueError):
            DensityMatrix(np.diag([0.7, 0.5, -0.1, -0.1]).astype(complex))

    def test_nan_rejected(self):
        bad = np.eye(4, dtype=complex) / 4
        bad[0, 0] = float("nan")
        with pytest.raises(ValueError):
            DensityMatrix(bad)

    def test_wrong_shape_rejected(self):
        with pytest.raises(ValueError):
            DensityMatrix(np.eye(2, dtype=complex) / 2)

    def test_immutability(self):
        rho = singlet()
        with pytest.raises(ValueError):
            rho.matrix[0, 0] = 1.0

    def test_random_states_valid(self, rng):
        for _ in range(50):
            rho = random_density_matrix(rng)
            assert is_hermitian(rho.matrix, 1e-12)
            assert rho.matrix.trace().real == pytest.approx(1.0, abs=1e-12)
            assert is_psd(rho.matrix, 1e-10)
