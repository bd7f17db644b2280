"""
Mean-map tests
==============
Mixing matrices, reconstruction coefficients, noise amplification and the
mixing validator.
"""

from __future__ import annotations

import numpy as np
import pytest

from llp_speller import (
    GroupMeans,
    MixingMatrix,
    MixingValidator,
    Severity,
    SingularMixingError,
    noise_amplification,
    pseudoinverse,
    reconstruct_means,
    validate_mixing,
)
from llp_speller.errors import DimensionMismatchError, InsufficientDataError
from llp_speller.mixing import compose_group_means, gram_determinant, mixing_from_specs
from llp_speller.models import ClassMeans, SequenceSpec, speller_design


class TestMixingMatrix:

    def test_speller_rows(self, speller_mixing: MixingMatrix) -> None:
        assert speller_mixing.n_groups == 2
        assert speller_mixing.rows[0] == pytest.approx((0.375, 0.625))
        assert speller_mixing.rows[1] == pytest.approx((1 / 9, 8 / 9))

    def test_from_target_ratios(self) -> None:
        m = MixingMatrix.from_target_ratios([0.5, 0.1, 0.9])
        assert m.n_groups == 3
        np.testing.assert_allclose(m.as_array().sum(axis=1), 1.0)

    def test_design_matches_speller(self, speller_mixing: MixingMatrix) -> None:
        derived = mixing_from_specs(speller_design())
        np.testing.assert_allclose(derived.as_array(), speller_mixing.as_array(), atol=1e-15)

    def test_design_with_conflicting_ratios(self) -> None:
        specs = [SequenceSpec(length=8, appearances=3, group=1), SequenceSpec(length=8, appearances=2, group=1)]
        with pytest.raises(ValueError, match="mixes target ratios"):
            mixing_from_specs(specs)

    def test_design_with_gap_in_groups(self) -> None:
        specs = [SequenceSpec.type1(), SequenceSpec(length=18, appearances=2, group=3)]
        with pytest.raises(ValueError, match="without gaps"):
            mixing_from_specs(specs)

    def test_permuted(self, speller_mixing: MixingMatrix) -> None:
        flipped = speller_mixing.permuted([1, 0])
        assert flipped.rows[0] == speller_mixing.rows[1]


class TestPseudoinverse:

    def test_speller_coefficients(self, speller_mixing: MixingMatrix) -> None:
        nu = pseudoinverse(speller_mixing)
        np.testing.assert_allclose(nu.nu_plus, [3.37, -2.37], atol=0.005)
        np.testing.assert_allclose(nu.nu_minus, [-0.42, 1.42], atol=0.005)

    def test_speller_exact_rationals(self, speller_mixing: MixingMatrix) -> None:
        nu = pseudoinverse(speller_mixing)
        np.testing.assert_allclose(nu.nu_plus, [64 / 19, -45 / 19], rtol=0, atol=1e-12)
        np.testing.assert_allclose(nu.nu_minus, [-8 / 19, 27 / 19], rtol=0, atol=1e-12)
        assert noise_amplification(speller_mixing) == pytest.approx(13828 / 361, abs=1e-12)

    def test_left_inverse(self, speller_mixing: MixingMatrix) -> None:
        assert pseudoinverse(speller_mixing).is_left_inverse_of(speller_mixing)

    def test_three_groups_left_inverse(self) -> None:
        m = MixingMatrix.from_target_ratios([0.5, 0.2, 0.05])
        nu = pseudoinverse(m)
        assert nu.n_groups == 3
        assert nu.is_left_inverse_of(m)

    def test_identity(self) -> None:
        np.testing.assert_allclose(pseudoinverse(MixingMatrix.identity()).nu, np.eye(2))

    def test_rank_one_raises(self) -> None:
        m = MixingMatrix(rows=((0.5, 0.5), (0.5, 0.5)))
        with pytest.raises(SingularMixingError):
            pseudoinverse(m)
        assert gram_determinant(m) == pytest.approx(0.0, abs=1e-12)


class TestReconstruction:

    def test_weight_example(self) -> None:
        m = MixingMatrix(rows=((50 / 90, 40 / 90), (40 / 100, 60 / 100)))
        g = GroupMeans(means=np.array([[6600 / 90], [7100 / 100]]), counts=np.array([90, 100]))
        means = reconstruct_means(pseudoinverse(m), g)
        assert means.mu_plus[0] == pytest.approx(80.0, abs=1e-9)
        assert means.mu_minus[0] == pytest.approx(65.0, abs=1e-9)

    def test_exact_group_means_round_trip(self, speller_mixing: MixingMatrix, rng: np.random.Generator) -> None:
        truth = ClassMeans(mu_plus=rng.normal(size=5), mu_minus=rng.normal(size=5))
        g = GroupMeans(compose_group_means(speller_mixing, truth), counts=np.array([32, 36]))
        back = reconstruct_means(pseudoinverse(speller_mixing), g)
        np.testing.assert_allclose(back.mu_plus, truth.mu_plus, atol=1e-12)
        np.testing.assert_allclose(back.mu_minus, truth.mu_minus, atol=1e-12)

    @pytest.mark.parametrize(
        "ratios, order",
        [([3 / 8, 1 / 9], [1, 0]), ([0.5, 0.2, 0.1], [2, 0, 1])],
    )
    def test_group_order_does_not_matter(
        self, ratios: list[float], order: list[int], rng: np.random.Generator
    ) -> None:
        m = MixingMatrix.from_target_ratios(ratios)
        truth = ClassMeans(mu_plus=rng.normal(size=4), mu_minus=rng.normal(size=4))
        noise = rng.normal(scale=0.1, size=(len(ratios), 4))
        means = compose_group_means(m, truth) + noise
        counts = np.arange(10, 10 + len(ratios))
        base = reconstruct_means(pseudoinverse(m), GroupMeans(means, counts=counts))
        shuffled = m.permuted(order)
        again = reconstruct_means(
            pseudoinverse(shuffled), GroupMeans(means[order], counts=counts[order])
        )
        np.testing.assert_allclose(again.mu_plus, base.mu_plus, atol=1e-12)
        np.testing.assert_allclose(again.mu_minus, base.mu_minus, atol=1e-12)
        assert noise_amplification(shuffled) == pytest.approx(noise_amplification(m), rel=1e-12)

    def test_empty_group(self, speller_mixing: MixingMatrix) -> None:
        g = GroupMeans(means=np.zeros((2, 3)), counts=np.array([4, 0]))
        with pytest.raises(InsufficientDataError, match=r"\[2\]"):
            reconstruct_means(pseudoinverse(speller_mixing), g)

    def test_group_count_mismatch(self, speller_mixing: MixingMatrix) -> None:
        g = GroupMeans(means=np.zeros((3, 3)), counts=np.array([1, 1, 1]))
        with pytest.raises(DimensionMismatchError):
            reconstruct_means(pseudoinverse(speller_mixing), g)


class TestNoiseAmplification:

    def test_speller(self, speller_mixing: MixingMatrix) -> None:
        assert noise_amplification(speller_mixing) == pytest.approx(38.30, abs=0.01)

    def test_identity(self) -> None:
        assert noise_amplification(MixingMatrix.identity()) == pytest.approx(4.0)

    def test_closer_ratios_amplify_more(self) -> None:
        far = noise_amplification(MixingMatrix.from_target_ratios([0.9, 0.1]))
        near = noise_amplification(MixingMatrix.from_target_ratios([0.4, 0.3]))
        assert near > far


class TestMixingValidator:

    def test_speller_passes(self, speller_mixing: MixingMatrix) -> None:
        result = validate_mixing(speller_mixing)
        assert result.passed
        assert result.rule_count == 5
        assert not result.errors

    def test_single_group(self) -> None:
        result = MixingValidator().validate(MixingMatrix(rows=((0.5, 0.5),)))
        assert "MX-001" in result.rule_ids()
        assert not result.passed

    def test_row_sum(self) -> None:
        result = validate_mixing(MixingMatrix(rows=((0.5, 0.6), (0.1, 0.9))))
        assert "MX-003" in result.rule_ids()

    def test_out_of_range(self) -> None:
        result = validate_mixing(MixingMatrix(rows=((1.2, -0.2), (0.1, 0.9))))
        assert "MX-002" in result.rule_ids()

    def test_rank(self) -> None:
        result = validate_mixing(MixingMatrix(rows=((0.3, 0.7), (0.3, 0.7))))
        assert "MX-004" in result.rule_ids()
        assert not result.passed

    def test_high_naf_is_info_only(self) -> None:
        result = validate_mixing(MixingMatrix.from_target_ratios([0.30, 0.25]))
        notice = [i for i in result.issues if i.rule_id == "MX-005"]
        assert notice and notice[0].severity == Severity.INFO
        assert result.passed
