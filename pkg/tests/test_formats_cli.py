"""
Formats, configuration and CLI tests
====================================
Readers and writers for the interchange files, TOML configuration, and the
``llp-speller`` commands driven through click's test runner.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from llp_speller import (
    LinearClassifier,
    MixingMatrix,
    SessionConfig,
    SymbolGrid,
    SyntheticModel,
    load_config,
    noise_amplification,
    simulate_session,
)
from llp_speller.cli import cli
from llp_speller.config import OUTPUT_ENV_VAR, ExperimentConfig
from llp_speller.errors import FormatError
from llp_speller.formats import (
    ResultWriter,
    load_mixing,
    load_model,
    load_snapshot,
    load_trials,
    read_features_csv,
    read_markers_csv,
    read_recording_csv,
    records_from_export,
    validate_document,
)
from llp_speller.formats.schemas import MIXING_SCHEMA
from llp_speller.models.signal import ContinuousRecording, Marker
from llp_speller.simulation import CharacterRecord

PROTOCOL = Path(__file__).parent.parent / "configs" / "protocol.toml"

SHORT_SESSION = """
[session]
sentence = "LLP"
seed = 4

[model]
snr_scale = 1.5
"""


def _write(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    return path


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


# ---------------------------------------------------------------------------
# Readers and writers
# ---------------------------------------------------------------------------


class TestCsvReaders:

    def test_markers_round_trip(self, tmp_path: Path) -> None:
        markers = [Marker(10, 3, 1, 1), Marker(35, 3, 2, -1), Marker(60, None, None, None)]
        with ResultWriter(tmp_path) as out:
            path = out.write_markers(markers)
        assert read_markers_csv(path) == markers

    def test_bad_label_reports_line(self, tmp_path: Path) -> None:
        path = _write(tmp_path / "m.csv", "sample_index,symbol,group,label\n10,1,1,+1\n20,1,1,2\n")
        with pytest.raises(FormatError) as info:
            read_markers_csv(path)
        assert info.value.line == 3
        assert "m.csv:3" in str(info.value)

    def test_missing_column(self, tmp_path: Path) -> None:
        path = _write(tmp_path / "m.csv", "sample_index,symbol,label\n10,1,1\n")
        with pytest.raises(FormatError, match="missing column"):
            read_markers_csv(path)

    def test_markers_must_increase(self, tmp_path: Path) -> None:
        path = _write(tmp_path / "m.csv", "sample_index,symbol,group,label\n10,1,1,1\n10,1,1,-1\n")
        with pytest.raises(FormatError, match="strictly increasing"):
            read_markers_csv(path)

    def test_recording_rejects_text(self, tmp_path: Path) -> None:
        path = _write(tmp_path / "r.csv", "Cz,Pz\n1.0,2.0\n3.0,abc\n")
        with pytest.raises(FormatError) as info:
            read_recording_csv(path, 100.0)
        assert info.value.line == 3

    def test_recording_columns_are_channels(self, tmp_path: Path) -> None:
        path = _write(tmp_path / "r.csv", "Cz,Pz\n1.0,2.0\n3.0,4.0\n5.0,6.0\n")
        rec = read_recording_csv(path, 100.0)
        assert rec.channel_names == ("Cz", "Pz")
        np.testing.assert_array_equal(rec.samples[1], [2.0, 4.0, 6.0])

    def test_time_column_is_dropped(self, tmp_path: Path) -> None:
        path = _write(tmp_path / "r.csv", "time_ms,Cz,Pz\n0.0,1.0,2.0\n10.0,3.0,4.0\n")
        assert read_recording_csv(path, 100.0).channel_names == ("Cz", "Pz")

    def test_recording_round_trip(self, tmp_path: Path) -> None:
        rec = ContinuousRecording(
            np.arange(12.0).reshape(3, 4), 250.0, ("O1", "Cz", "Pz"), (Marker(1, 0, 1, 1),)
        )
        with ResultWriter(tmp_path) as out:
            data, markers = out.write_recording(rec)
        assert data.read_text().splitlines()[2].startswith("4.0,")
        back = read_recording_csv(data, 250.0, markers)
        np.testing.assert_array_equal(back.samples, rec.samples)
        assert back.markers == rec.markers

    def test_ragged_row(self, tmp_path: Path) -> None:
        path = _write(tmp_path / "r.csv", "Cz,Pz\n1.0,2.0\n3.0\n")
        with pytest.raises(FormatError, match="expected 2 fields"):
            read_recording_csv(path, 100.0)


class TestJsonDocuments:

    def test_mixing_file(self, tmp_path: Path) -> None:
        path = _write(tmp_path / "pi.json", json.dumps(MixingMatrix.speller().to_json_dict()))
        assert load_mixing(path).rows == MixingMatrix.speller().rows

    def test_mixing_schema_violation(self, tmp_path: Path) -> None:
        path = _write(tmp_path / "pi.json", json.dumps({"rows": [[0.5, 0.5, 0.0]]}))
        with pytest.raises(FormatError, match="Mixing matrix invalid"):
            load_mixing(path)

    def test_invalid_json_has_line(self, tmp_path: Path) -> None:
        path = _write(tmp_path / "pi.json", '{\n  "rows": [\n')
        with pytest.raises(FormatError) as info:
            load_mixing(path)
        assert info.value.line is not None

    def test_validate_document_root(self) -> None:
        with pytest.raises(FormatError, match="<root>"):
            validate_document({"label": "x"}, MIXING_SCHEMA)

    def test_snapshot(self, tmp_path: Path) -> None:
        clf = LinearClassifier(np.array([0.5, -1.0, 2.0]), gamma=0.1)
        with ResultWriter(tmp_path) as out:
            path = out.write_json("clf.json", clf.to_snapshot())
        back = LinearClassifier.from_snapshot(load_snapshot(path))
        np.testing.assert_array_equal(back.w, clf.w)
        assert back.gamma == 0.1

    def test_model(self, tmp_path: Path, small_model: SyntheticModel) -> None:
        with ResultWriter(tmp_path) as out:
            path = out.write_json("model.json", small_model.to_json_dict())
        np.testing.assert_array_equal(load_model(path).mu_plus, small_model.mu_plus)


class TestFeatureExport:

    def _session(self, model: SyntheticModel) -> tuple[list[CharacterRecord], SessionConfig]:
        cfg = SessionConfig(sentence="AB", seed=2)
        records: list[CharacterRecord] = []
        simulate_session(model, cfg, records=records)
        return records, cfg

    def test_export_reattaches(self, tmp_path: Path, small_model: SyntheticModel) -> None:
        records, cfg = self._session(small_model)
        with ResultWriter(tmp_path) as out:
            out.write_features(records, small_model.channel_names, len(small_model.intervals))
            out.write_trials(records, seed=cfg.seed, mixing=MixingMatrix.speller(), grid=cfg.grid)
        table = read_features_csv(tmp_path / "features.csv")
        assert table.names[:2] == ("i0_Cz", "i0_O1")
        session = load_trials(tmp_path / "trials.json")
        assert session.n_trials == 2
        back = records_from_export(session, table)
        for a, b in zip(back, records):
            np.testing.assert_array_equal(a.features[0], b.features[0])
            np.testing.assert_array_equal(a.labels[0], b.labels[0])

    def test_group_tags_must_agree(self, tmp_path: Path, small_model: SyntheticModel) -> None:
        records, cfg = self._session(small_model)
        with ResultWriter(tmp_path) as out:
            out.write_features(records)
            out.write_trials(records, seed=cfg.seed, mixing=MixingMatrix.speller(), grid=cfg.grid)
        table = read_features_csv(tmp_path / "features.csv")
        table.group[0] = 3 - table.group[0]
        with pytest.raises(FormatError, match="group tags"):
            records_from_export(load_trials(tmp_path / "trials.json"), table)


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


class TestConfig:

    def test_defaults(self) -> None:
        cfg = load_config(None)
        assert noise_amplification(cfg.mixing_matrix()) == pytest.approx(38.30, abs=0.01)
        assert cfg.symbol_grid() == SymbolGrid.speller()

    def test_protocol_file(self) -> None:
        cfg = load_config(PROTOCOL)
        assert cfg.session.repetitions == 3
        assert len(cfg.session.design) == 6
        assert len(cfg.session.sentence) == 63
        assert noise_amplification(cfg.mixing_matrix()) == pytest.approx(38.30, abs=0.01)
        assert cfg.session_config(seed=9).seed == 9

    def test_missing_rows(self, tmp_path: Path) -> None:
        path = _write(tmp_path / "c.toml", '[mixing]\nlabel = "custom"\n')
        with pytest.raises(FormatError, match="mixing.rows"):
            load_config(path)

    def test_unknown_key(self, tmp_path: Path) -> None:
        path = _write(tmp_path / "c.toml", "[session]\nsentense = \"AB\"\n")
        with pytest.raises(FormatError, match="sentense"):
            load_config(path)

    def test_bad_toml(self, tmp_path: Path) -> None:
        path = _write(tmp_path / "c.toml", "[session\n")
        with pytest.raises(FormatError, match="invalid TOML"):
            load_config(path)

    def test_output_dir_precedence(self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv(OUTPUT_ENV_VAR, str(tmp_path / "env"))
        cfg = ExperimentConfig()
        assert cfg.output_dir() == tmp_path / "env"
        assert cfg.output_dir(tmp_path / "cli") == tmp_path / "cli"
        monkeypatch.delenv(OUTPUT_ENV_VAR)
        assert cfg.output_dir() == Path("llp-output")


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------


class TestNafCommand:

    def test_speller(self, runner: CliRunner) -> None:
        result = runner.invoke(cli, ["naf"])
        assert result.exit_code == 0
        assert "38.30" in result.stdout

    def test_inline_identity(self, runner: CliRunner) -> None:
        result = runner.invoke(cli, ["--quiet", "naf", "--matrix", "[[1,0],[0,1]]"])
        assert result.exit_code == 0
        assert result.stdout.strip() == "4.00"

    def test_json(self, runner: CliRunner) -> None:
        result = runner.invoke(cli, ["naf", "--json-output"])
        doc = json.loads(result.stdout)
        assert doc["naf"] == pytest.approx(38.30, abs=0.01)
        assert doc["nu"][0] == pytest.approx([3.37, -2.37], abs=0.005)

    def test_rank_deficient(self, runner: CliRunner) -> None:
        result = runner.invoke(cli, ["naf", "--matrix", "[[0.5,0.5],[0.5,0.5]]"])
        assert result.exit_code == 2

    def test_garbage_matrix(self, runner: CliRunner) -> None:
        result = runner.invoke(cli, ["naf", "--matrix", "not-a-matrix"])
        assert result.exit_code == 2


class TestGenSequencesCommand:

    def test_reproducible_output(self, runner: CliRunner, tmp_path: Path) -> None:
        for name in ("a", "b"):
            result = runner.invoke(cli, ["-q", "gen-sequences", "--count", "3", "--seed", "5",
                                         "--out", str(tmp_path / name)])
            assert result.exit_code == 0
        for k in range(3):
            a = (tmp_path / "a" / f"trial_{k:04d}.json").read_bytes()
            assert a == (tmp_path / "b" / f"trial_{k:04d}.json").read_bytes()
        report = json.loads((tmp_path / "a" / "validation_report.json").read_text())
        assert report["failed"] == 0

    def test_generated_trials_validate(self, runner: CliRunner, tmp_path: Path) -> None:
        runner.invoke(cli, ["-q", "gen-sequences", "--count", "2", "--out", str(tmp_path)])
        result = runner.invoke(cli, ["validate", "--json-output", *map(str, sorted(tmp_path.glob("trial_*.json")))])
        assert result.exit_code == 0
        assert json.loads(result.stdout)["passed"] is True

    def test_infeasible_design(self, runner: CliRunner, tmp_path: Path) -> None:
        config = _write(tmp_path / "c.toml", "[[session.design]]\nlength = 2\nappearances = 2\ngroup = 1\n")
        result = runner.invoke(cli, ["gen-sequences", "--config", str(config), "--out", str(tmp_path / "o")])
        assert result.exit_code == 3
        assert "infeasible" in result.stdout

    def test_invalid_config(self, runner: CliRunner, tmp_path: Path) -> None:
        config = _write(tmp_path / "c.toml", "[[session.design]]\nlength = 8\ngroup = 1\n")
        result = runner.invoke(cli, ["gen-sequences", "--config", str(config), "--out", str(tmp_path / "o")])
        assert result.exit_code == 2

    def test_tampered_trial_fails_validation(self, runner: CliRunner, tmp_path: Path) -> None:
        runner.invoke(cli, ["-q", "gen-sequences", "--out", str(tmp_path)])
        path = tmp_path / "trial_0000.json"
        doc = json.loads(path.read_text())
        doc["stimuli"][0]["group"] = 2
        path.write_text(json.dumps(doc))
        assert runner.invoke(cli, ["validate", str(path)]).exit_code == 1


class TestSimulateAndEvaluate:

    def test_export_then_replay(self, runner: CliRunner, tmp_path: Path) -> None:
        config = _write(tmp_path / "c.toml", SHORT_SESSION)
        out = tmp_path / "sim"
        result = runner.invoke(cli, ["-q", "simulate", "--config", str(config), "--export-features",
                                     "--out", str(out)])
        assert result.exit_code == 0, result.output
        for name in ("session_seed4.json", "characters.csv", "summary.csv", "ramp_up.csv", "model.json"):
            assert (out / name).is_file()
        seed_dir = out / "seed_4"

        replay = tmp_path / "replay"
        result = runner.invoke(cli, ["-q", "evaluate", "--features", str(seed_dir / "features.csv"),
                                     "--trials", str(seed_dir / "trials.json"), "--out", str(replay)])
        assert result.exit_code == 0, result.output
        assert (replay / "decisions.csv").read_bytes() == (seed_dir / "decisions.csv").read_bytes()

    def test_snr_option_wins(self, runner: CliRunner, tmp_path: Path) -> None:
        config = _write(tmp_path / "c.toml", SHORT_SESSION)
        runner.invoke(cli, ["-q", "simulate", "--config", str(config), "--snr", "0.25", "--out", str(tmp_path)])
        assert json.loads((tmp_path / "model.json").read_text())["snr_scale"] == 0.25

    def test_features_need_trials(self, runner: CliRunner, tmp_path: Path) -> None:
        path = _write(tmp_path / "f.csv", "trial,stimulus,group,label,f0\n0,0,1,1,0.5\n")
        result = runner.invoke(cli, ["evaluate", "--features", str(path)])
        assert result.exit_code == 2

    def test_recording_round_trip(self, runner: CliRunner, tmp_path: Path) -> None:
        raw = tmp_path / "raw"
        result = runner.invoke(cli, ["-q", "synthesize", "--characters", "2", "--rate", "200",
                                     "--snr", "2", "--out", str(raw)])
        assert result.exit_code == 0, result.output
        assert len(read_markers_csv(raw / "recording_markers.csv")) == 136

        result = runner.invoke(cli, ["evaluate", "--recording", str(raw / "recording.csv"),
                                     "--markers", str(raw / "recording_markers.csv"), "--rate", "200",
                                     "--out", str(tmp_path / "eval"), "--json-output"])
        assert result.exit_code == 0, result.output
        report = json.loads(result.stdout)
        assert report["epochs"] == 136
        assert report["features"] == 174
        assert report["supervised_cv_auc"] > 0.8
        assert (tmp_path / "eval" / "classifier.json").is_file()
        assert (tmp_path / "eval" / "neurophysiology.csv").is_file()

    def test_unlabelled_recording(self, runner: CliRunner, tmp_path: Path) -> None:
        raw = tmp_path / "raw"
        runner.invoke(cli, ["-q", "synthesize", "--characters", "2", "--rate", "200", "--out", str(raw)])
        hidden = [Marker(m.sample_index, m.symbol, m.group, None)
                  for m in read_markers_csv(raw / "recording_markers.csv")]
        with ResultWriter(raw) as out:
            out.write_markers(hidden, name="hidden.csv")
        result = runner.invoke(cli, ["evaluate", "--recording", str(raw / "recording.csv"),
                                     "--markers", str(raw / "hidden.csv"), "--rate", "200",
                                     "--out", str(tmp_path / "eval"), "--json-output"])
        assert result.exit_code == 0, result.output
        report = json.loads(result.stdout)
        assert "supervised_cv_auc" not in report
        assert "llp_gamma" in report


class TestNafSweepCommand:

    def test_empty_candidates(self, runner: CliRunner, tmp_path: Path) -> None:
        path = _write(tmp_path / "cands.json", "[]")
        result = runner.invoke(cli, ["naf-sweep", "--candidates", str(path), "--out", str(tmp_path)])
        assert result.exit_code == 2

    def _sweep(self, runner: CliRunner, tmp_path: Path, *extra: str) -> list[dict[str, str]]:
        path = _write(tmp_path / "cands.json", "[[[0.8, 0.2], [0.1, 0.9]]]")
        result = runner.invoke(cli, ["-q", "naf-sweep", "--candidates", str(path), "--epochs", "200",
                                     "--seeds", "2", "--out", str(tmp_path), *extra])
        assert result.exit_code == 0, result.output
        with (tmp_path / "naf_sweep.csv").open(newline="") as fh:
            return list(csv.DictReader(fh))

    def test_single_candidate_reports_auc(self, runner: CliRunner, tmp_path: Path) -> None:
        rows = self._sweep(runner, tmp_path)
        assert len(rows) == 1
        assert rows[0]["naf"].startswith("6.12")
        assert 0.0 <= float(rows[0]["llp_auc"]) <= 1.0
        assert 0.0 <= float(rows[0]["supervised_auc"]) <= 1.0

    def test_no_auc_leaves_columns_empty(self, runner: CliRunner, tmp_path: Path) -> None:
        rows = self._sweep(runner, tmp_path, "--no-auc")
        assert float(rows[0]["mean_rmse"]) > 0.0
        assert rows[0]["llp_auc"] == ""
        assert rows[0]["supervised_auc"] == ""


def test_version(runner: CliRunner) -> None:
    result = runner.invoke(cli, ["version"])
    assert result.exit_code == 0
    assert "llp-speller" in result.stdout
