"""
Online Sessions
===============
Character-by-character spelling with the unsupervised decoder: decode with
the current classifier, add the new epochs to the group statistics, retrain.
At the end of every sentence all characters are decoded again with the
final classifier.

Random streams are split per repetition into trial generation, epoch noise
and the uniform guess used before the first classifier exists, so a
recorded session can be replayed with identical decisions.

Example::

    from llp_speller.models.session import SessionConfig
    from llp_speller.simulation import SyntheticModel, simulate_session

    result = simulate_session(SyntheticModel.default().with_snr(0.6), SessionConfig(seed=7))
    sum(o.online_correct for o in result.outcomes)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..builder.trial_builder import TrialBuilder, label_stimuli
from ..decoder.classifier import LinearClassifier, reconstruct_class_means, train_llp
from ..decoder.selection import TrialEvidence, posthoc_reanalyze, select_symbol
from ..decoder.state import OnlineLLPState
from ..errors import InsufficientDataError
from ..evaluation.metrics import ScoredSet, auc
from ..mixing.mean_map import mixing_from_specs
from ..models.mixing import MixingMatrix
from ..models.sequence import SymbolGrid, Trial
from ..models.session import CharacterOutcome, SessionConfig, SessionResult
from .model import SyntheticModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SessionStreams:
    trials: np.random.Generator
    noise: np.random.Generator
    guesses: np.random.Generator


def session_streams(seed: int, repetitions: int) -> list[SessionStreams]:
    streams = []
    for rep in np.random.SeedSequence(seed).spawn(repetitions):
        t, n, g = rep.spawn(3)
        streams.append(
            SessionStreams(np.random.default_rng(t), np.random.default_rng(n), np.random.default_rng(g))
        )
    return streams


@dataclass
class CharacterRecord:
    """Everything observed while spelling one character."""
    repetition: int
    index: int
    true_symbol: int
    trials: list[Trial] = field(default_factory=list)
    features: list[np.ndarray] = field(default_factory=list)
    labels: list[np.ndarray] = field(default_factory=list)

    @property
    def evidence(self) -> list[TrialEvidence]:
        return list(zip(self.trials, self.features))


class OnlineSpeller:
    """Decoder loop for one sentence; create a new instance per sentence."""

    def __init__(
        self,
        d: int,
        mixing: MixingMatrix,
        grid: SymbolGrid,
        guess_rng: np.random.Generator,
        forgetting: float = 1.0,
    ) -> None:
        self.mixing = mixing
        self.grid = grid
        self.state = OnlineLLPState(d=d, n_groups=mixing.n_groups, forgetting=forgetting)
        self.classifier: LinearClassifier | None = None
        self.history: list[list[TrialEvidence]] = []
        self._guess_rng = guess_rng

    def decide(self, evidence: Sequence[TrialEvidence]) -> tuple[int, bool]:
        """Online decision and whether it was a uniform guess."""
        if self.classifier is None:
            return int(self._guess_rng.choice(np.asarray(self.grid.selectable))), True
        return select_symbol(self.classifier, list(evidence), grid=self.grid), False

    def learn(self, evidence: Sequence[TrialEvidence]) -> None:
        for trial, X in evidence:
            self.state.update_batch(X, trial.groups)
        self.history.append(list(evidence))
        try:
            self.classifier = train_llp(self.state, self.mixing)
        except InsufficientDataError as exc:
            logger.debug("classifier not retrained yet: %s", exc)

    def reconstructed_difference(self) -> np.ndarray | None:
        try:
            return reconstruct_class_means(self.state, self.mixing).difference
        except InsufficientDataError:
            return None

    def reanalyze(self) -> list[int] | None:
        if self.classifier is None:
            return None
        return posthoc_reanalyze(self.classifier, self.history, grid=self.grid)


def _character_auc(clf: LinearClassifier | None, record: CharacterRecord) -> float | None:
    if clf is None or not record.labels:
        return None
    y = np.concatenate(record.labels)
    if not (np.any(y > 0) and np.any(y < 0)):
        return None
    scores = np.concatenate([np.asarray(clf.score(X)) for X in record.features])
    return auc(ScoredSet(scores, y))


def _run_sentence(
    speller: OnlineSpeller,
    records: Sequence[CharacterRecord],
    true_difference: np.ndarray | None,
) -> list[CharacterOutcome]:
    online: list[tuple[CharacterRecord, int, bool, float | None, float | None]] = []
    for record in records:
        deciding = speller.classifier
        symbol, guessed = speller.decide(record.evidence)
        char_auc = _character_auc(deciding, record)
        speller.learn(record.evidence)
        rmse = None
        if true_difference is not None:
            diff = speller.reconstructed_difference()
            if diff is not None:
                rmse = float(np.sqrt(np.mean((diff - true_difference) ** 2)))
        online.append((record, symbol, guessed, char_auc, rmse))
    posthoc = speller.reanalyze() or [symbol for _, symbol, _, _, _ in online]
    return [
        CharacterOutcome(
            repetition=record.repetition,
            index=record.index,
            true_symbol=record.true_symbol,
            online_symbol=symbol,
            posthoc_symbol=post,
            guessed=guessed,
            auc=char_auc,
            reconstruction_rmse=rmse,
        )
        for (record, symbol, guessed, char_auc, rmse), post in zip(online, posthoc)
    ]


def simulate_session(
    m: SyntheticModel,
    cfg: SessionConfig,
    mixing: MixingMatrix | None = None,
    records: list[CharacterRecord] | None = None,
) -> SessionResult:
    """
    Spell ``cfg.sentence`` ``cfg.repetitions`` times with synthetic epochs.

    ``mixing`` defaults to the matrix implied by ``cfg.design``. Pass a list
    as ``records`` to collect the generated trials and epochs.
    """
    mixing = mixing or mixing_from_specs(cfg.design)
    symbols = cfg.symbols()
    outcomes: list[CharacterOutcome] = []
    for rep, streams in enumerate(session_streams(cfg.seed, cfg.repetitions)):
        sentence: list[CharacterRecord] = []
        for index, symbol in enumerate(symbols):
            record = CharacterRecord(repetition=rep, index=index, true_symbol=symbol)
            for _ in range(cfg.trials_per_character):
                trial = (
                    TrialBuilder(cfg.grid)
                    .with_design(cfg.design)
                    .with_seed(int(streams.trials.integers(2**63 - 1)))
                    .build()
                )
                labels = label_stimuli(trial, symbol, cfg.grid)
                record.trials.append(trial)
                record.labels.append(labels)
                record.features.append(m.sample_epochs(labels, streams.noise))
            sentence.append(record)
        speller = OnlineSpeller(m.d, mixing, cfg.grid, streams.guesses, cfg.forgetting)
        rep_outcomes = _run_sentence(speller, sentence, m.effective_difference)
        outcomes.extend(rep_outcomes)
        if records is not None:
            records.extend(sentence)
        logger.info(
            "seed %d repetition %d: online %d/%d, post-hoc %d/%d",
            cfg.seed, rep,
            sum(o.online_correct for o in rep_outcomes), len(rep_outcomes),
            sum(o.posthoc_correct for o in rep_outcomes), len(rep_outcomes),
        )
    return SessionResult(seed=cfg.seed, snr_scale=m.snr_scale, outcomes=tuple(outcomes))


def replay_session(
    records: Sequence[CharacterRecord],
    mixing: MixingMatrix,
    grid: SymbolGrid | None = None,
    seed: int = 0,
    forgetting: float = 1.0,
    snr_scale: float = float("nan"),
) -> SessionResult:
    """
    Run the online decoder over recorded characters.

    With the session seed of a simulated session the guesses before the
    first classifier match, so the decisions reproduce the simulation.
    """
    grid = grid or SymbolGrid.speller()
    if not records:
        return SessionResult(seed=seed, snr_scale=snr_scale, outcomes=())
    ordered = sorted(records, key=lambda r: (r.repetition, r.index))
    n_reps = ordered[-1].repetition + 1
    streams = session_streams(seed, n_reps)
    outcomes: list[CharacterOutcome] = []
    for rep in range(n_reps):
        sentence = [r for r in ordered if r.repetition == rep]
        if not sentence:
            continue
        d = int(np.asarray(sentence[0].features[0]).shape[1])
        speller = OnlineSpeller(d, mixing, grid, streams[rep].guesses, forgetting)
        outcomes.extend(_run_sentence(speller, sentence, None))
    return SessionResult(seed=seed, snr_scale=snr_scale, outcomes=tuple(outcomes))
