"""Shared fixtures for the llp-speller test suite."""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from llp_speller import MixingMatrix, SymbolGrid, SyntheticModel, TrialBuilder, Trial  # noqa: E402


@pytest.fixture
def speller_mixing() -> MixingMatrix:
    return MixingMatrix.speller()


@pytest.fixture
def grid() -> SymbolGrid:
    return SymbolGrid.speller()


@pytest.fixture(scope="session")
def speller_trial() -> Trial:
    """One seeded trial; generation is the slow part of several tests."""
    return TrialBuilder.speller().with_seed(7).build()


@pytest.fixture
def small_model() -> SyntheticModel:
    """Eight-dimensional model: fast enough for decoder and simulation tests."""
    return SyntheticModel.default(
        seed=3,
        snr_scale=1.0,
        rank=2,
        channel_names=["Cz", "O1"],
        intervals=[(50.0, 120.0), (121.0, 200.0), (201.0, 280.0), (281.0, 380.0)],
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
