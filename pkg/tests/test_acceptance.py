"""
Monte-Carlo acceptance checks
=============================
End-to-end statistical properties of the decoder on synthetic data:
convergence rate, noise-amplification ordering, sequence validity at
scale, online spelling accuracy and the chance floor.

All tests here are marked ``slow``; run them with ``pytest -m slow``.
"""

from __future__ import annotations

import numpy as np
import pytest
from scipy import stats

from llp_speller import (
    MixingMatrix,
    SessionConfig,
    SessionResult,
    SymbolGrid,
    SyntheticModel,
    TrialBuilder,
    TrialValidator,
    calibrate_snr,
    label_stimuli,
    noise_amplification,
    simulate_session,
)
from llp_speller.evaluation import accuracy_report, chronological_cv
from llp_speller.simulation import calibration_labels, candidate_mixings, naf_sweep, reconstruction_rmse

pytestmark = pytest.mark.slow

N_SESSIONS = 20


@pytest.fixture(scope="module")
def model() -> SyntheticModel:
    return SyntheticModel.default(seed=0)


@pytest.fixture(scope="module")
def calibrated(model: SyntheticModel) -> SyntheticModel:
    return model.with_snr(calibrate_snr(model, 0.97, seed=1))


@pytest.fixture(scope="module")
def sessions(calibrated: SyntheticModel) -> list[SessionResult]:
    return [simulate_session(calibrated, SessionConfig(seed=s)) for s in range(N_SESSIONS)]


class TestMeanReconstruction:

    def test_rmse_halves_with_four_times_the_data(self, model: SyntheticModel) -> None:
        pi = MixingMatrix.speller()
        small = np.mean([reconstruction_rmse(model, pi, 288, seed) for seed in range(100)])
        large = np.mean([reconstruction_rmse(model, pi, 1152, seed) for seed in range(100)])
        assert 1.6 <= small / large <= 2.5

    def test_error_ranks_follow_noise_amplification(self, model: SyntheticModel) -> None:
        rows = naf_sweep(candidate_mixings(), model, 2160, seeds=range(50))
        assert len({round(r.naf, 2) for r in rows}) == len(rows) >= 4
        rho = stats.spearmanr([r.naf for r in rows], [r.mean_rmse for r in rows])[0]
        assert rho == pytest.approx(1.0)


class TestSequenceValidity:

    def test_thousand_trials(self, grid: SymbolGrid) -> None:
        validator = TrialValidator(grid)
        rng = np.random.default_rng(0)
        for seed in range(1000):
            trial = TrialBuilder.speller().with_seed(seed).build()
            result = validator.validate(trial)
            assert result.passed, (seed, result.rule_ids())
            assert len(trial) == 68
            attended = int(rng.choice(grid.selectable))
            assert int(np.sum(label_stimuli(trial, attended, grid) == 1)) == 16


class TestOnlineSpelling:

    def test_calibration_hits_target(self, model: SyntheticModel, calibrated: SyntheticModel) -> None:
        rng = np.random.default_rng(99)
        labels = calibration_labels(63 * 68, rng)
        X = calibrated.sample_epochs(labels, rng)
        assert chronological_cv(X, labels) == pytest.approx(0.97, abs=0.01)

    def test_online_accuracy(self, sessions: list[SessionResult]) -> None:
        reports = [accuracy_report(r.online_decisions, r.truth) for r in sessions]
        assert all(r.n_characters == 63 for r in reports)
        assert np.mean([r.accuracy for r in reports]) >= 0.80
        assert np.mean([r.post_ramp_accuracy for r in reports]) >= 0.88

    def test_posthoc_beats_online(self, sessions: list[SessionResult]) -> None:
        wins = sum(
            accuracy_report(r.posthoc_decisions, r.truth).accuracy
            >= accuracy_report(r.online_decisions, r.truth).accuracy
            for r in sessions
        )
        assert wins >= 0.9 * N_SESSIONS

    def test_chance_floor(self, model: SyntheticModel) -> None:
        flat = model.with_snr(0.0)
        hits = sum(
            accuracy_report(r.online_decisions, r.truth).n_correct
            for r in (simulate_session(flat, SessionConfig(seed=s)) for s in range(N_SESSIONS))
        )
        n = 63 * N_SESSIONS
        lo, hi = stats.binom.interval(0.95, n, 1 / 32)
        assert lo <= hits <= hi


def test_noise_amplification_of_candidates() -> None:
    nafs = [noise_amplification(m) for m in candidate_mixings()]
    np.testing.assert_allclose(nafs, [6.12, 16.5, 23.08, 38.30, 252.0], atol=0.01)
