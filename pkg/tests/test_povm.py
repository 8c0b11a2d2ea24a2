import math

import numpy as np
import pytest

from conftest import bob_marginal
from seqbell.povm import (
    NullOutcomeError,
    OutcomeDistribution,
    PointerQuality,
    UnsharpMeasurement,
    Wing,
    effect,
    effect_sqrt,
    luders_nonselective,
    luders_selective,
    outcome_probability,
    pointer_model_update,
    quality_of,
)
from seqbell.qops import (
    DensityMatrix,
    IDENTITY_2,
    Z_AXIS,
    hermitian_sqrt,
    kron,
    random_density_matrix,
    random_unit_direction,
    singlet,
)


def measurement(lam, direction=Z_AXIS):
    return UnsharpMeasurement(direction=direction, sharpness=lam)


def product_state_00() -> DensityMatrix:
    ket0 = np.diag([1.0, 0.0]).astype(complex)
    return DensityMatrix(kron(ket0, ket0))


class TestUnsharpMeasurement:
    def test_sharpness_range_enforced(self):
        with pytest.raises(ValueError):
            measurement(1.2)
        with pytest.raises(ValueError):
            measurement(-0.1)

    def test_trivial_limit_admitted(self):
        assert measurement(0.0).sharpness == 0.0


class TestEffect:
    def test_sharp_limit_is_projector(self):
        np.testing.assert_allclose(effect(measurement(1.0), +1), np.diag([1.0, 0.0]), atol=1e-15)

    def test_white_noise_limit(self, rng):
        m = measurement(0.0, random_unit_direction(rng))
        np.testing.assert_allclose(effect(m, +1), IDENTITY_2 / 2, atol=1e-15)
        np.testing.assert_allclose(effect(m, -1), IDENTITY_2 / 2, atol=1e-15)

    def test_point_eight_values(self):
        np.testing.assert_allclose(effect(measurement(0.8), +1), np.diag([0.9, 0.1]), atol=1e-15)

    def test_completeness(self, rng):
        for _ in range(50):
            m = measurement(rng.uniform(0, 1), random_unit_direction(rng))
            total = effect(m, +1) + effect(m, -1)
            np.testing.assert_allclose(total, IDENTITY_2, atol=1e-12)

    def test_eigenvalues(self, rng):
        for lam in (0.1, 0.5, 0.9):
            m = measurement(lam, random_unit_direction(rng))
            np.testing.assert_allclose(
                np.linalg.eigvalsh(effect(m, +1)), [(1 - lam) / 2, (1 + lam) / 2], atol=1e-12
            )

    def test_strictly_unsharp_between_limits(self, rng):
        # E^2 differs from E for every sharpness strictly inside (0, 1).
        for lam in (0.05, 0.3, 0.7, 0.99):
            m = measurement(lam, random_unit_direction(rng))
            for outcome in (+1, -1):
                e = effect(m, outcome)
                assert np.max(np.abs(e @ e - e)) > 1e-6


class TestEffectSqrt:
    def test_matches_generic_square_root(self, rng):
        for _ in range(50):
            m = measurement(rng.uniform(0, 1), random_unit_direction(rng))
            for outcome in (+1, -1):
                np.testing.assert_allclose(
                    effect_sqrt(m, outcome), hermitian_sqrt(effect(m, outcome)), atol=1e-12
                )

    def test_squares_to_effect(self, rng):
        for _ in range(50):
            m = measurement(rng.uniform(0, 1), random_unit_direction(rng))
            root = effect_sqrt(m, +1)
            np.testing.assert_allclose(root @ root, effect(m, +1), atol=1e-12)


class TestOutcomeProbability:
    def test_singlet_marginal_is_unbiased_sharp(self):
        dist = outcome_probability(singlet(), Wing.BOB, measurement(1.0))
        assert dist.p_plus == pytest.approx(0.5, abs=1e-14)

    def test_singlet_marginal_is_unbiased_any_sharpness(self, rng):
        m = measurement(0.3, random_unit_direction(rng))
        dist = outcome_probability(singlet(), Wing.BOB, m)
        assert dist.p_plus == pytest.approx(0.5, abs=1e-14)
        assert dist.p_minus == pytest.approx(0.5, abs=1e-14)

    def test_product_state(self):
        dist = outcome_probability(product_state_00(), Wing.BOB, measurement(0.8))
        assert dist.p_plus == pytest.approx(0.9, abs=1e-14)
        assert dist.p_minus == pytest.approx(0.1, abs=1e-14)

    def test_alice_wing(self):
        dist = outcome_probability(product_state_00(), Wing.ALICE, measurement(0.8))
        assert dist.p_plus == pytest.approx(0.9, abs=1e-14)


class TestOutcomeDistribution:
    def test_sum_enforced(self):
        with pytest.raises(ValueError):
            OutcomeDistribution(0.7, 0.7)

    def test_range_enforced(self):
        with pytest.raises(ValueError):
            OutcomeDistribution(1.4, -0.4)

    def test_tiny_negative_clipped(self):
        dist = OutcomeDistribution(-1e-15, 1.0 + 1e-15)
        assert dist.p_plus == 0.0
        assert dist.p_minus == 1.0


class TestLudersSelective:
    def test_projective_limit_on_singlet(self):
        p, post = luders_selective(singlet(), Wing.BOB, measurement(1.0), +1)
        assert p == pytest.approx(0.5, abs=1e-14)
        # Bob collapses to |0>; the singlet anticorrelation puts Alice in |1>.
        expected = kron(np.diag([0.0, 1.0]), np.diag([1.0, 0.0]))
        np.testing.assert_allclose(post.matrix, expected, atol=1e-12)

    def test_identity_instrument(self, rng):
        rho = random_density_matrix(rng)
        p, post = luders_selective(rho, Wing.BOB, measurement(0.0, random_unit_direction(rng)), +1)
        assert p == pytest.approx(0.5, abs=1e-12)
        np.testing.assert_allclose(post.matrix, rho.matrix, atol=1e-12)

    def test_unsharp_bob_marginal(self):
        _, post = luders_selective(singlet(), Wing.BOB, measurement(0.8), +1)
        np.testing.assert_allclose(bob_marginal(post.matrix), np.diag([0.9, 0.1]), atol=1e-12)

    def test_null_event_raises(self):
        with pytest.raises(NullOutcomeError):
            luders_selective(product_state_00(), Wing.BOB, measurement(1.0), -1)

    def test_probability_matches_outcome_law(self, rng):
        for _ in range(20):
            rho = random_density_matrix(rng)
            m = measurement(rng.uniform(0.1, 1.0), random_unit_direction(rng))
            dist = outcome_probability(rho, Wing.BOB, m)
            p_plus, _ = luders_selective(rho, Wing.BOB, m, +1)
            assert p_plus == pytest.approx(dist.p_plus, abs=1e-12)


class TestLudersNonselective:
    def test_zero_sharpness_is_identity(self, rng):
        rho = random_density_matrix(rng)
        post = luders_nonselective(rho, Wing.BOB, measurement(0.0, random_unit_direction(rng)))
        np.testing.assert_allclose(post.matrix, rho.matrix, atol=1e-12)

    def test_sharp_limit_dephases(self, rng):
        rho = random_density_matrix(rng)
        post = luders_nonselective(rho, Wing.BOB, measurement(1.0))
        blocks = post.matrix.reshape(2, 2, 2, 2)
        # z-basis coherences on Bob's wing must vanish.
        assert np.max(np.abs(blocks[:, 0, :, 1])) <= 1e-12
        assert np.max(np.abs(blocks[:, 1, :, 0])) <= 1e-12

    def test_closed_form_agreement(self, rng):
        # Kraus sum must equal F*rho + (1-F)*(P rho P + ...) entrywise.
        for _ in range(100):
            rho = random_density_matrix(rng)
            lam = rng.uniform(0, 1)
            n = random_unit_direction(rng)
            wing = Wing.BOB if rng.random() < 0.5 else Wing.ALICE
            via_kraus = luders_nonselective(rho, wing, measurement(lam, n))
            via_pointer = pointer_model_update(rho, wing, n, quality_of(lam))
            np.testing.assert_allclose(via_kraus.matrix, via_pointer.matrix, atol=1e-12)

    def test_specific_sharpness_two_formulas(self, rng):
        lam = 1.0 / math.sqrt(2.0)
        rho = random_density_matrix(rng)
        n = random_unit_direction(rng)
        via_kraus = luders_nonselective(rho, Wing.BOB, measurement(lam, n))
        via_pointer = pointer_model_update(rho, Wing.BOB, n, quality_of(lam))
        np.testing.assert_allclose(via_kraus.matrix, via_pointer.matrix, atol=1e-12)

    def test_trace_and_positivity_preserved(self, rng):
        for _ in range(1000):
            rho = random_density_matrix(rng)
            m = measurement(rng.uniform(0, 1), random_unit_direction(rng))
            post = luders_nonselective(rho, Wing.BOB, m)
            # DensityMatrix construction enforces PSD; re-check trace exactly.
            assert post.matrix.trace().real == pytest.approx(1.0, abs=1e-12)

    def test_selective_consistency(self, rng):
        # Mixing the conditional states with their probabilities recovers
        # the non-selective update.
        for _ in range(50):
            rho = random_density_matrix(rng)
            m = measurement(rng.uniform(0.05, 0.95), random_unit_direction(rng))
            mixed = np.zeros((4, 4), dtype=complex)
            for outcome in (+1, -1):
                p, post = luders_selective(rho, Wing.BOB, m, outcome)
                mixed += p * post.matrix
            np.testing.assert_allclose(mixed, luders_nonselective(rho, Wing.BOB, m).matrix, atol=1e-12)


class TestPointerQuality:
    def test_sharp_limit(self):
        pq = quality_of(1.0)
        assert pq.quality_f == 0.0
        assert pq.precision_g == 1.0

    def test_trivial_limit(self):
        pq = quality_of(0.0)
        assert (pq.quality_f, pq.precision_g) == (1.0, 0.0)

    def test_three_four_five(self):
        pq = quality_of(0.6)
        assert pq.quality_f == pytest.approx(0.8, abs=1e-15)
        assert pq.precision_g == 0.6

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            quality_of(1.5)

    def test_optimality_identity_grid(self):
        for lam in np.linspace(0.0, 1.0, 1000):
            pq = quality_of(float(lam))
            assert abs(pq.quality_f**2 + pq.precision_g**2 - 1.0) <= 1e-14

    def test_unattainable_pointer_rejected(self):
        with pytest.raises(ValueError):
            PointerQuality(quality_f=0.9, precision_g=0.9)

    def test_suboptimal_pointer_representable(self):
        # A flat-profile pointer obeys G = 1 - F, strictly inside the disc.
        pq = PointerQuality(quality_f=0.7, precision_g=0.3)
        assert pq.quality_f**2 + pq.precision_g**2 < 1.0


class TestPointerModelUpdate:
    def test_full_quality_is_identity(self, rng):
        rho = random_density_matrix(rng)
        post = pointer_model_update(rho, Wing.BOB, Z_AXIS, PointerQuality(1.0, 0.0))
        np.testing.assert_allclose(post.matrix, rho.matrix, atol=1e-15)

    def test_zero_quality_dephases(self, rng):
        rho = random_density_matrix(rng)
        post = pointer_model_update(rho, Wing.BOB, Z_AXIS, PointerQuality(0.0, 1.0))
        np.testing.assert_allclose(
            post.matrix, luders_nonselective(rho, Wing.BOB, measurement(1.0)).matrix, atol=1e-12
        )

    def test_equivalence_at_point_eight(self, rng):
        rho = random_density_matrix(rng)
        post_pointer = pointer_model_update(rho, Wing.BOB, Z_AXIS, quality_of(0.8))
        post_luders = luders_nonselective(rho, Wing.BOB, measurement(0.8))
        np.testing.assert_allclose(post_pointer.matrix, post_luders.matrix, atol=1e-12)
