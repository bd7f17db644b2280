"""
Signal chain tests
==================
Band-pass design, decimation, epoching, baseline correction and interval
features.
"""

from __future__ import annotations

import numpy as np
import pytest

from llp_speller import ContinuousRecording, Epoch, FilterSpec, Marker, PreprocessingSettings
from llp_speller.models import DEFAULT_INTERVALS, DEFAULT_MONTAGE, IntervalPreset
from llp_speller.preprocessing import (
    apply_filter,
    baseline_correct,
    design_bandpass,
    downsample,
    extract_epochs,
    frequency_response,
    interval_features,
    is_stable,
    preprocess_recording,
    select_channels,
    stopband_edges,
    window_offsets,
)


def _direct_response(sos: np.ndarray, freqs: np.ndarray, rate: float) -> np.ndarray:
    """Product of the section transfer functions evaluated on the unit circle."""
    z = np.exp(2j * np.pi * np.asarray(freqs) / rate)
    h = np.ones_like(z)
    for b0, b1, b2, a0, a1, a2 in sos:
        h *= (b0 + b1 / z + b2 / z**2) / (a0 + a1 / z + a2 / z**2)
    return h


def _recording(n_samples: int = 4000, rate: float = 1000.0, markers: tuple[Marker, ...] = ()) -> ContinuousRecording:
    rng = np.random.default_rng(0)
    data = rng.normal(scale=5.0, size=(len(DEFAULT_MONTAGE), n_samples))
    return ContinuousRecording(data, rate, DEFAULT_MONTAGE, markers)


class TestBandpass:

    RATE = 1000.0

    @pytest.fixture
    def sos(self) -> np.ndarray:
        return design_bandpass(FilterSpec(), self.RATE)

    def test_passband_within_3db(self, sos: np.ndarray) -> None:
        freqs = np.linspace(1.0, 7.0, 25)
        gain_db = 20 * np.log10(np.abs(frequency_response(sos, freqs, self.RATE)))
        assert np.all(np.abs(gain_db) <= 3.0)

    @pytest.mark.parametrize("freq", [0.1, 25.0])
    def test_stopband_attenuation(self, sos: np.ndarray, freq: float) -> None:
        gain_db = 20 * np.log10(np.abs(_direct_response(sos, np.array([freq]), self.RATE)))[0]
        assert gain_db <= -(FilterSpec().stopband_attenuation_db - 3.0)

    def test_response_matches_direct_evaluation(self, sos: np.ndarray) -> None:
        freqs = np.array([0.1, 0.5, 1.0, 3.0, 7.0, 8.0, 25.0, 100.0])
        np.testing.assert_allclose(
            frequency_response(sos, freqs, self.RATE),
            _direct_response(sos, freqs, self.RATE),
            rtol=1e-6, atol=1e-12,
        )

    def test_stable(self, sos: np.ndarray) -> None:
        assert is_stable(sos)
        assert sos.shape == (3, 6)

    def test_passband_edges_are_3db_points(self, sos: np.ndarray) -> None:
        gain_db = 20 * np.log10(np.abs(frequency_response(sos, np.array([0.5, 8.0]), self.RATE)))
        np.testing.assert_allclose(gain_db, -3.01, atol=0.1)

    def test_stopband_mode_passes_edges_through(self) -> None:
        spec = FilterSpec(low_hz=0.2, high_hz=25.0, edges="stopband")
        assert stopband_edges(spec, self.RATE) == (0.2, 25.0)

    def test_band_above_nyquist(self) -> None:
        with pytest.raises(ValueError, match="Nyquist"):
            design_bandpass(FilterSpec(), rate=10.0)

    def test_inverted_band(self) -> None:
        with pytest.raises(ValueError, match="low < high"):
            FilterSpec(low_hz=8.0, high_hz=0.5)

    def test_filter_keeps_markers(self) -> None:
        rec = _recording(markers=(Marker(500, label=1),))
        out = apply_filter(design_bandpass(FilterSpec(), rec.rate), rec)
        assert out.markers == rec.markers
        assert out.samples.shape == rec.samples.shape


class TestEpochs:

    def test_window_offsets(self) -> None:
        assert window_offsets((-200.0, 700.0), 100.0) == (-20, 70)

    def test_downsample_moves_markers(self) -> None:
        rec = _recording(markers=(Marker(1005), Marker(2019)))
        out = downsample(rec, 10)
        assert out.rate == 100.0
        assert [m.sample_index for m in out.markers] == [100, 201]
        assert out.n_samples == 400

    def test_downsample_collision(self) -> None:
        rec = _recording(markers=(Marker(1001), Marker(1005)))
        with pytest.raises(ValueError, match="collide"):
            downsample(rec, 10)

    def test_epochs_at_edges_are_skipped(self) -> None:
        rec = _recording(n_samples=3000, markers=(Marker(100), Marker(1500), Marker(2800)))
        result = extract_epochs(rec, (-200.0, 700.0))
        assert len(result) == 1
        assert [m.sample_index for m in result.skipped] == [100, 2800]
        epoch = result.epochs[0]
        assert epoch.samples.shape == (31, 901)
        assert epoch.start_ms == pytest.approx(-200.0)
        assert epoch.end_ms == pytest.approx(700.0)

    def test_all_markers_kept(self) -> None:
        markers = tuple(Marker(i) for i in range(300, 3000, 250))
        assert len(extract_epochs(_recording(n_samples=4000, markers=markers))) == len(markers)

    def test_baseline_correction(self) -> None:
        samples = np.vstack([np.full(91, 3.0), np.arange(91, dtype=float)])
        e = Epoch(samples, start_ms=-200.0, rate=100.0, channel_names=("Cz", "O1"))
        corrected = baseline_correct(e)
        np.testing.assert_allclose(corrected.samples[0], 0.0)
        # baseline of channel 2: samples 0..20 have mean 10
        assert corrected.samples[1, 20] == pytest.approx(10.0)

    def test_baseline_outside_epoch(self) -> None:
        e = Epoch(np.zeros((1, 10)), start_ms=0.0, rate=100.0, channel_names=("Cz",))
        with pytest.raises(ValueError, match="no samples"):
            baseline_correct(e, (-200.0, -100.0))

    def test_markers_must_increase(self) -> None:
        with pytest.raises(ValueError, match="strictly increasing"):
            _recording(markers=(Marker(500), Marker(400)))


class TestIntervalFeatures:

    def _epoch(self) -> Epoch:
        t = np.arange(-200.0, 701.0, 10.0)
        samples = np.vstack([t, -t, np.ones_like(t)])
        return Epoch(samples, start_ms=-200.0, rate=100.0, channel_names=("Fp1", "Cz", "O1"))

    def test_interval_means_and_layout(self) -> None:
        fv = interval_features(self._epoch())
        assert fv.channel_names == ("Cz", "O1")
        assert len(fv) == 12
        # interval (50, 120) at 100 Hz covers 50..120 ms: mean 85
        assert fv.values[0] == pytest.approx(-85.0)
        assert fv.values[1] == pytest.approx(1.0)
        assert fv.layout[2] == (1, 0)
        assert fv.names()[:2] == ["i0_Cz", "i0_O1"]

    def test_explicit_channels(self) -> None:
        fv = interval_features(self._epoch(), channels=["Fp1"])
        assert fv.values[0] == pytest.approx(85.0)

    def test_empty_interval(self) -> None:
        with pytest.raises(ValueError, match="contains no samples"):
            interval_features(self._epoch(), intervals=[(801.0, 900.0)])

    def test_missing_channel(self) -> None:
        with pytest.raises(KeyError):
            interval_features(self._epoch(), channels=["Pz"])

    def test_select_channels(self) -> None:
        assert len(select_channels(DEFAULT_MONTAGE)) == 29


class TestPreprocessRecording:

    def test_default_feature_dimension(self) -> None:
        markers = tuple(Marker(i, symbol=0, group=1, label=-1) for i in range(1000, 9000, 250))
        rec = _recording(n_samples=10000, markers=markers)
        data = preprocess_recording(rec)
        assert data.matrix().shape == (len(markers), 174)
        assert len(DEFAULT_INTERVALS) * 29 == 174
        assert data.markers() == list(markers_after_decimation(markers, 10))
        assert not data.skipped

    def test_auditory_preset(self) -> None:
        markers = (Marker(2000), Marker(4000))
        rec = _recording(n_samples=6000, markers=markers)
        settings = PreprocessingSettings(preset=IntervalPreset.AUDITORY)
        data = preprocess_recording(rec, settings)
        assert data.epochs[0].end_ms == pytest.approx(1200.0)
        assert data.matrix().shape == (2, 174)

    def test_non_integer_rate_warns(self, caplog: pytest.LogCaptureFixture) -> None:
        rec = ContinuousRecording(np.zeros((31, 3000)), 250.0, DEFAULT_MONTAGE, (Marker(1000),))
        with caplog.at_level("WARNING", logger="llp_speller"):
            data = preprocess_recording(rec)
        assert "not an integer multiple" in caplog.text
        assert len(data.features) == 1

    def test_empty_recording_markers(self) -> None:
        data = preprocess_recording(_recording())
        assert data.matrix().shape == (0, 0)


def markers_after_decimation(markers: tuple[Marker, ...], factor: int) -> list[Marker]:
    return [Marker(m.sample_index // factor, m.symbol, m.group, m.label) for m in markers]
