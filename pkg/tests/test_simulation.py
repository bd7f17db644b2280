"""
Simulation tests
================
Synthetic generative model, artificial datasets, online sessions with
replay, mixing sweeps and raw recording synthesis.
"""

from __future__ import annotations

import numpy as np
import pytest

from llp_speller import (
    MixingMatrix,
    SessionConfig,
    SymbolGrid,
    SyntheticModel,
    TrialBuilder,
    assemble_artificial,
    calibrate_snr,
    noise_amplification,
    preprocess_recording,
    replay_session,
    sample_epoch,
    simulate_session,
)
from llp_speller.errors import DimensionMismatchError, InsufficientDataError
from llp_speller.evaluation import chronological_cv
from llp_speller.mixing import mixing_from_specs
from llp_speller.simulation import (
    CharacterRecord,
    LabeledPool,
    candidate_mixings,
    calibration_labels,
    group_sizes,
    naf_sweep,
    reconstruction_rmse,
    session_streams,
    synthesize_recording,
    target_counts,
)


class TestSyntheticModel:

    def test_default_dimension(self) -> None:
        m = SyntheticModel.default()
        assert m.d == 174
        assert len(m.channel_names) == 29

    def test_class_means_scale_with_snr(self) -> None:
        m = SyntheticModel.default(seed=1)
        np.testing.assert_allclose(m.with_snr(0.0).class_mean(1), m.with_snr(0.0).class_mean(-1))
        np.testing.assert_allclose(m.with_snr(2.0).effective_difference, 2.0 * m.effective_difference)

    def test_covariance_is_positive_definite(self) -> None:
        m = SyntheticModel.default(seed=4, rank=3, loading=1.0)
        assert np.all(np.linalg.eigvalsh(m.covariance) >= 1.0 - 1e-9)

    def test_sample_moments(self, small_model: SyntheticModel, rng: np.random.Generator) -> None:
        X = small_model.sample_epochs(np.ones(20000, dtype=int), rng)
        np.testing.assert_allclose(X.mean(axis=0), small_model.class_mean(1), atol=0.05)
        np.testing.assert_allclose(np.cov(X, rowvar=False), small_model.covariance, atol=0.08)

    def test_sample_epoch_layout(self, small_model: SyntheticModel, rng: np.random.Generator) -> None:
        fv = sample_epoch(small_model, 1, rng)
        assert fv.channel_names == ("Cz", "O1")
        assert len(fv) == 8

    def test_layout_mismatch(self) -> None:
        with pytest.raises(DimensionMismatchError):
            SyntheticModel(np.zeros(4), np.zeros(4), np.eye(4), channel_names=("Cz",), intervals=((0.0, 1.0),))

    def test_json_round_trip(self, small_model: SyntheticModel) -> None:
        back = SyntheticModel.from_json_dict(small_model.to_json_dict())
        np.testing.assert_array_equal(back.covariance, small_model.covariance)
        assert back.intervals == small_model.intervals


class TestCalibration:

    def test_labels_have_sixteen_targets_per_trial(self, rng: np.random.Generator) -> None:
        labels = calibration_labels(68 * 5, rng)
        assert [(labels[k * 68 : (k + 1) * 68] == 1).sum() for k in range(5)] == [16] * 5

    def test_hits_target_auc(self, small_model: SyntheticModel) -> None:
        scale = calibrate_snr(small_model, 0.85, seed=5, n_epochs=68 * 30)
        rng = np.random.default_rng(5)
        labels = calibration_labels(68 * 30, rng)
        X = small_model.with_snr(scale).features_from_noise(labels, rng.standard_normal((68 * 30, small_model.d)))
        assert chronological_cv(X, labels) == pytest.approx(0.85, abs=0.01)

    def test_invalid_target(self, small_model: SyntheticModel) -> None:
        with pytest.raises(ValueError, match=r"\[0.5, 1\)"):
            calibrate_snr(small_model, 1.0)


class TestArtificialDataset:

    @pytest.fixture
    def pool(self, small_model: SyntheticModel, rng: np.random.Generator) -> LabeledPool:
        return LabeledPool.from_model(small_model, 200, 600, rng)

    def test_group_sizes_and_targets(self, speller_mixing: MixingMatrix) -> None:
        sizes = group_sizes(681, 2)
        assert sizes.tolist() == [341, 340]
        assert target_counts(speller_mixing, np.array([340, 340])).tolist() == [128, 38]

    def test_realized_ratios(self, pool: LabeledPool, speller_mixing: MixingMatrix, rng: np.random.Generator) -> None:
        data = assemble_artificial(pool, speller_mixing, 680, rng)
        np.testing.assert_array_equal(data.group_counts(), [340, 340])
        np.testing.assert_allclose(data.realized_ratios(), [128 / 340, 38 / 340])

    def test_pool_too_small(self, small_model: SyntheticModel, speller_mixing: MixingMatrix) -> None:
        rng = np.random.default_rng(1)
        pool = LabeledPool.from_model(small_model, 50, 600, rng)
        with pytest.raises(InsufficientDataError, match="need 166 targets"):
            assemble_artificial(pool, speller_mixing, 680, rng)

    def test_explicit_sizes_must_add_up(self, pool: LabeledPool, speller_mixing: MixingMatrix, rng: np.random.Generator) -> None:
        with pytest.raises(DimensionMismatchError):
            assemble_artificial(pool, speller_mixing, 680, rng, sizes=[300, 300])

    def test_pool_needs_both_classes(self) -> None:
        with pytest.raises(InsufficientDataError):
            LabeledPool(np.zeros((3, 2)), np.ones(3))


class TestSweep:

    def test_candidates_are_ordered_by_naf(self) -> None:
        nafs = [noise_amplification(m) for m in candidate_mixings()]
        assert nafs == sorted(nafs)
        assert len(set(np.round(nafs, 2))) == len(nafs)

    def test_rmse_is_deterministic(self, small_model: SyntheticModel, speller_mixing: MixingMatrix) -> None:
        a = reconstruction_rmse(small_model, speller_mixing, 680, seed=3)
        assert a == reconstruction_rmse(small_model, speller_mixing, 680, seed=3)
        assert a > 0

    def test_single_matrix_gives_single_row(self, small_model: SyntheticModel) -> None:
        rows = naf_sweep([MixingMatrix.identity()], small_model, 200, seeds=[0, 1], evaluate_auc=True)
        assert len(rows) == 1
        assert rows[0].naf == pytest.approx(4.0)
        assert rows[0].n_seeds == 2
        assert rows[0].llp_auc == pytest.approx(rows[0].supervised_auc, abs=0.05)

    def test_no_seeds(self, small_model: SyntheticModel) -> None:
        with pytest.raises(ValueError):
            naf_sweep(candidate_mixings(), small_model, 200, seeds=[])


class TestSession:

    CFG = SessionConfig(sentence="LLP SPELLER", repetitions=2, seed=21)

    def test_streams_are_reproducible(self) -> None:
        a, b = session_streams(5, 2), session_streams(5, 2)
        assert a[1].noise.random() == b[1].noise.random()
        assert a[0].guesses.random() != a[1].guesses.random()

    def test_outcome_shape(self, small_model: SyntheticModel) -> None:
        result = simulate_session(small_model, self.CFG)
        assert len(result.outcomes) == 22
        assert [o.repetition for o in result.outcomes] == [0] * 11 + [1] * 11
        assert result.truth[:3] == SymbolGrid.speller().encode("LLP")

    def test_first_character_of_each_sentence_is_guessed(self, small_model: SyntheticModel) -> None:
        result = simulate_session(small_model, self.CFG)
        guessed = [o.guessed for o in result.outcomes]
        assert guessed == ([True] + [False] * 10) * 2
        assert result.outcomes[0].auc is None
        assert result.outcomes[1].auc is not None

    def test_deterministic(self, small_model: SyntheticModel) -> None:
        assert simulate_session(small_model, self.CFG) == simulate_session(small_model, self.CFG)

    def test_strong_signal_spells_correctly(self, small_model: SyntheticModel) -> None:
        cfg = SessionConfig(sentence="HELLO WORLD", seed=3)
        result = simulate_session(small_model.with_snr(4.0), cfg)
        later = result.outcomes[3:]
        assert sum(o.online_correct for o in later) >= len(later) - 1
        assert sum(o.posthoc_correct for o in result.outcomes) >= 10

    def test_reconstruction_error_shrinks(self, small_model: SyntheticModel) -> None:
        cfg = SessionConfig(sentence="ABCDEFGHIJKLMNOPQRST", seed=8)
        rmse = [o.reconstruction_rmse for o in simulate_session(small_model, cfg).outcomes]
        assert rmse[0] is not None
        assert np.mean(rmse[-5:]) < np.mean(rmse[:3])

    def test_records_and_replay(self, small_model: SyntheticModel) -> None:
        records: list[CharacterRecord] = []
        result = simulate_session(small_model, self.CFG, records=records)
        assert len(records) == 22
        assert all(r.features[0].shape == (68, small_model.d) for r in records)
        replayed = replay_session(list(reversed(records)), mixing_from_specs(self.CFG.design), seed=self.CFG.seed)
        assert replayed.online_decisions == result.online_decisions
        assert replayed.posthoc_decisions == result.posthoc_decisions

    def test_several_trials_per_character(self, small_model: SyntheticModel) -> None:
        records: list[CharacterRecord] = []
        cfg = SessionConfig(sentence="AB", trials_per_character=2, seed=1)
        simulate_session(small_model, cfg, records=records)
        assert [len(r.trials) for r in records] == [2, 2]

    def test_replay_without_records(self) -> None:
        assert replay_session([], MixingMatrix.speller()).outcomes == ()


class TestRecordingSynthesis:

    def test_markers_and_preprocessing(self, grid: SymbolGrid) -> None:
        trials = [TrialBuilder.speller().with_seed(s).build() for s in (1, 2)]
        attended = [grid.symbol_id("A"), grid.symbol_id("Z")]
        rec = synthesize_recording(trials, attended, grid=grid, seed=4)
        assert len(rec.markers) == 136
        assert sum(m.label == 1 for m in rec.markers) == 32
        assert rec.markers[1].sample_index - rec.markers[0].sample_index == 250
        data = preprocess_recording(rec)
        assert data.matrix().shape == (136, 174)
        assert {m.group for m in data.markers()} == {1, 2}

    def test_target_response_is_larger(self, grid: SymbolGrid) -> None:
        trials = [TrialBuilder.speller().with_seed(s).build() for s in range(3)]
        rec = synthesize_recording(trials, [0, 1, 2], grid=grid, seed=0, snr_scale=2.0, noise_uv=1.0)
        data = preprocess_recording(rec)
        y = np.array([m.label for m in data.markers()])
        names = data.features[0].names()
        col = names.index("i3_Cz")
        X = data.matrix()
        assert X[y == 1, col].mean() > X[y == -1, col].mean() + 1.0

    def test_length_mismatch(self, grid: SymbolGrid) -> None:
        with pytest.raises(ValueError):
            synthesize_recording([TrialBuilder.speller().with_seed(1).build()], [0, 1], grid=grid)
