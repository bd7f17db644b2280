"""
llp-speller CLI
===============
Command-line interface for the llp-speller library.

Commands:
    naf             Noise amplification and inverse coefficients of a mixing matrix
    gen-sequences   Generate and validate trials
    validate        Validate trial JSON files
    simulate        Simulate online spelling sessions over seeds
    synthesize      Write a synthetic raw recording with markers
    evaluate        Analyse a recording, or replay exported features
    naf-sweep       Reconstruction error across candidate mixing matrices
    version         Show version information

Exit codes: 0 success, 1 validation failures reported, 2 invalid input,
3 generation or convergence failure.

Usage::

    llp-speller naf --matrix speller
    llp-speller gen-sequences --count 1000 --seed 3
    llp-speller simulate --seeds 20 --config configs/protocol.toml
    llp-speller evaluate --features out/seed_0/features.csv --trials out/seed_0/trials.json
"""

from __future__ import annotations

import functools
import json
import logging
import sys
from pathlib import Path
from typing import TYPE_CHECKING, Any, Callable, TypeVar

import click
import numpy as np
from pydantic import ValidationError
from rich import box
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table

from .. import __version__
from ..errors import (
    ConvergenceError,
    DimensionMismatchError,
    FormatError,
    GenerationError,
    InsufficientDataError,
    SingularMixingError,
)

if TYPE_CHECKING:
    from ..config import ExperimentConfig
    from ..models.mixing import MixingMatrix
    from ..models.session import SessionConfig, SessionResult
    from ..simulation import CharacterRecord, SyntheticModel

console = Console()
logger = logging.getLogger("llp_speller")

EXIT_FAILED = 1
EXIT_INVALID = 2
EXIT_GENERATION = 3

F = TypeVar("F", bound=Callable[..., Any])


def _exit_codes(fn: F) -> F:
    """Map library errors onto the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return fn(*args, **kwargs)
        except (GenerationError, ConvergenceError) as exc:
            console.print(f"[red]{type(exc).__name__}: {exc}[/red]")
            diagnostics = getattr(exc, "diagnostics", None)
            if diagnostics:
                console.print(f"[dim]{json.dumps(diagnostics, default=str)}[/dim]")
            sys.exit(EXIT_GENERATION)
        except ValidationError as exc:
            for err in exc.errors():
                where = ".".join(str(x) for x in err["loc"]) or "<root>"
                console.print(f"[red]invalid input: {where}: {err['msg']}[/red]")
            sys.exit(EXIT_INVALID)
        except (
            FormatError,
            SingularMixingError,
            InsufficientDataError,
            DimensionMismatchError,
            ValueError,
        ) as exc:
            console.print(f"[red]{type(exc).__name__}: {exc}[/red]")
            sys.exit(EXIT_INVALID)

    return wrapper  # type: ignore[return-value]


def _configure_logging(level: int) -> None:
    if not any(isinstance(h, RichHandler) for h in logger.handlers):
        logger.addHandler(RichHandler(console=Console(stderr=True), show_path=False))
    logger.setLevel(level)


def _quiet(ctx: click.Context) -> bool:
    return bool((ctx.obj or {}).get("quiet", False))


def _load_cfg(config: Path | None) -> "ExperimentConfig":
    from ..config import load_config

    return load_config(config)


def _parse_matrix(spec: str) -> "MixingMatrix":
    """Preset name, path to a JSON file, or inline JSON (``[[..],[..]]`` or ``{"rows": ..}``)."""
    from ..formats import load_mixing, validate_document
    from ..formats.schemas import MIXING_SCHEMA
    from ..models.mixing import MixingMatrix

    presets = {"speller": MixingMatrix.speller, "identity": MixingMatrix.identity}
    if spec in presets:
        return presets[spec]()
    if Path(spec).is_file():
        return load_mixing(spec)
    try:
        doc = json.loads(spec)
    except json.JSONDecodeError as exc:
        raise FormatError(f"--matrix is neither a preset, a file nor JSON: {exc.msg}") from exc
    if isinstance(doc, list):
        doc = {"rows": doc}
    validate_document(doc, MIXING_SCHEMA)
    return MixingMatrix.model_validate(doc)


@click.group()
@click.version_option(version=__version__, prog_name="llp-speller")
@click.option("--quiet", "-q", is_flag=True, help="Only warnings and errors; no tables")
@click.option("--verbose", "-v", is_flag=True, help="Debug logging")
@click.pass_context
def cli(ctx: click.Context, quiet: bool, verbose: bool) -> None:
    """
    llp-speller – unsupervised decoding for ERP spellers.

    Learning from label proportions: class means are recovered from
    sequence-group means with known target ratios, so the speller
    calibrates itself while the user spells.
    """
    ctx.ensure_object(dict)
    ctx.obj["quiet"] = quiet
    _configure_logging(logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO)


# ---------------------------------------------------------------------------
# naf
# ---------------------------------------------------------------------------


@cli.command()
@click.option("--matrix", "matrix_spec", default="speller", show_default=True,
              help="Preset (speller, identity), JSON file, or inline JSON rows")
@click.option("--json-output", is_flag=True, help="Output results as JSON")
@click.pass_context
@_exit_codes
def naf(ctx: click.Context, matrix_spec: str, json_output: bool) -> None:
    """Noise amplification factor and inverse coefficients of a mixing matrix."""
    from ..mixing import noise_amplification, pseudoinverse, validate_mixing

    m = _parse_matrix(matrix_spec)
    report = validate_mixing(m)
    if not report.passed:
        for issue in report.errors:
            console.print(f"[red]ERROR[/red] [{issue.rule_id}] {issue.message}")
        sys.exit(EXIT_INVALID)
    nu = pseudoinverse(m)
    factor = noise_amplification(m)

    if json_output:
        click.echo(json.dumps({
            "matrix": m.to_json_dict(),
            "naf": factor,
            "nu": nu.nu.tolist(),
            "issues": [i.to_dict() for i in report.issues],
        }, indent=2))
        return
    if _quiet(ctx):
        click.echo(f"{factor:.2f}")
        return

    console.print(Panel(
        f"[bold]{m.label or 'mixing matrix'}[/bold]  G = {m.n_groups}\n"
        f"NAF: [cyan]{factor:.2f}[/cyan]",
        title="Noise amplification",
        border_style="blue",
    ))
    t = Table(box=box.SIMPLE, title="Inverse coefficients ν")
    t.add_column("class")
    for g in range(m.n_groups):
        t.add_column(f"group {g + 1}", justify="right")
    t.add_row("target (+)", *(f"{v:.2f}" for v in nu.nu_plus))
    t.add_row("non-target (−)", *(f"{v:.2f}" for v in nu.nu_minus))
    console.print(t)
    for issue in report.issues:
        console.print(f"  [blue]{issue.severity.value}[/blue] [{issue.rule_id}] {issue.message}")


# ---------------------------------------------------------------------------
# gen-sequences / validate
# ---------------------------------------------------------------------------


@cli.command("gen-sequences")
@click.option("--config", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True)
@click.option("--count", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--out", type=click.Path(file_okay=False, path_type=Path))
@click.option("--max-restarts", type=click.IntRange(min=1), default=None)
@click.pass_context
@_exit_codes
def gen_sequences(
    ctx: click.Context,
    config: Path | None,
    seed: int,
    count: int,
    out: Path | None,
    max_restarts: int | None,
) -> None:
    """Generate COUNT trials and write them with a validation report."""
    from ..builder import TrialBuilder
    from ..formats import ResultWriter
    from ..validator import TrialValidator

    cfg = _load_cfg(config)
    grid = cfg.symbol_grid()
    seeds = np.random.default_rng(seed).integers(2**63 - 1, size=count)
    validator = TrialValidator(grid)
    failed = 0
    with ResultWriter(cfg.output_dir(out)) as writer:
        reports = []
        for k, trial_seed in enumerate(seeds):
            builder = TrialBuilder(grid).with_design(cfg.session.design).with_seed(int(trial_seed))
            if max_restarts is not None:
                builder.with_max_restarts(max_restarts)
            trial = builder.build()
            result = validator.validate(trial)
            failed += not result.passed
            reports.append(dict(result.to_dict(), index=k, seed=int(trial_seed)))
            writer.write_json(f"trial_{k:04d}.json", trial.to_json_dict())
        writer.write_json("validation_report.json", {
            "count": count, "seed": seed, "failed": failed, "trials": reports,
        })

    if not _quiet(ctx):
        status = "[bold green]PASS[/bold green]" if failed == 0 else "[bold red]FAIL[/bold red]"
        console.print(Panel(
            f"Trials: {count}  |  Violations: {failed}  |  Status: {status}\n"
            f"Output: {writer.out_dir}",
            title="Sequence generation",
            border_style="blue",
        ))
    sys.exit(EXIT_FAILED if failed else 0)


@cli.command()
@click.argument("trial_paths", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--config", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--strict", is_flag=True, help="Exit with code 1 if any warnings")
@click.option("--json-output", is_flag=True, help="Output results as JSON")
@_exit_codes
def validate(trial_paths: tuple[Path, ...], config: Path | None, strict: bool, json_output: bool) -> None:
    """Validate trial JSON files against the sequence design rules."""
    from ..formats import read_json, validate_document
    from ..formats.schemas import TRIAL_SCHEMA
    from ..models.sequence import Trial
    from ..validator import TrialValidator

    validator = TrialValidator(_load_cfg(config).symbol_grid())
    results = []
    for path in trial_paths:
        doc = read_json(path)
        validate_document(doc, TRIAL_SCHEMA, path)
        results.append((path, validator.validate(Trial.model_validate(doc))))

    all_passed = all(r.passed for _, r in results)
    has_warnings = any(r.warnings for _, r in results)
    if json_output:
        click.echo(json.dumps(
            {"passed": all_passed, "results": [dict(r.to_dict(), file=str(p)) for p, r in results]},
            indent=2,
        ))
    else:
        t = Table(box=box.SIMPLE, title="Trial validation")
        t.add_column("File")
        t.add_column("Status")
        t.add_column("Rules", justify="right")
        t.add_column("Issues")
        for path, r in results:
            status_cell = "[green]✓ PASS[/green]" if r.passed else "[red]✗ FAIL[/red]"
            issues = ", ".join(sorted(r.rule_ids())) or "—"
            t.add_row(path.name, status_cell, str(r.rule_count), issues)
        console.print(t)
        for path, r in results:
            for issue in r.issues:
                color = "red" if issue.severity.value == "ERROR" else "yellow"
                console.print(f"  {path.name}: [{color}]{issue.severity.value}[/{color}] "
                              f"[{issue.rule_id}] {issue.message}")
    sys.exit(EXIT_FAILED if not all_passed or (strict and has_warnings) else 0)


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def _synthetic_model(cfg: "ExperimentConfig", snr: float | None, target_auc: float | None) -> "SyntheticModel":
    from ..simulation import SyntheticModel, calibrate_snr

    ms = cfg.model
    model = SyntheticModel.default(seed=ms.seed, rank=ms.rank, loading=ms.loading)
    scale = snr if snr is not None else ms.snr_scale
    if scale is None:
        target = target_auc if target_auc is not None else ms.target_auc
        scale = calibrate_snr(model, target, seed=ms.seed + 1, n_epochs=ms.calibration_epochs)
    return model.with_snr(scale)


def _simulate_one(
    model: "SyntheticModel", session: "SessionConfig", mixing: "MixingMatrix", keep: bool
) -> tuple["SessionResult", list["CharacterRecord"] | None]:
    from ..simulation import simulate_session

    records: list[CharacterRecord] | None = [] if keep else None
    return simulate_session(model, session, mixing=mixing, records=records), records


@cli.command()
@click.option("--config", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--seed", type=click.IntRange(min=0), default=None, help="First session seed")
@click.option("--seeds", "n_seeds", type=click.IntRange(min=1), default=1, show_default=True,
              help="Number of consecutive seeds")
@click.option("--out", type=click.Path(file_okay=False, path_type=Path))
@click.option("--snr", type=click.FloatRange(min=0.0), default=None, help="Fixed snr_scale")
@click.option("--target-auc", type=click.FloatRange(0.5, 1.0, max_open=True), default=None)
@click.option("--matrix", "matrix_spec", default=None, help="Mixing matrix used by the decoder")
@click.option("--export-features", is_flag=True, help="Write features.csv and trials.json per seed")
@click.option("--jobs", type=click.IntRange(min=1), default=1, show_default=True)
@click.pass_context
@_exit_codes
def simulate(
    ctx: click.Context,
    config: Path | None,
    seed: int | None,
    n_seeds: int,
    out: Path | None,
    snr: float | None,
    target_auc: float | None,
    matrix_spec: str | None,
    export_features: bool,
    jobs: int,
) -> None:
    """Simulate online spelling sessions and summarise accuracy per seed."""
    from concurrent.futures import ProcessPoolExecutor

    from ..evaluation import accuracy_report
    from ..formats import ResultWriter

    cfg = _load_cfg(config)
    mixing = _parse_matrix(matrix_spec) if matrix_spec else cfg.mixing_matrix()
    model = _synthetic_model(cfg, snr, target_auc)
    first = cfg.session.seed if seed is None else seed
    sessions = [cfg.session_config(seed=first + k) for k in range(n_seeds)]
    logger.info("simulating %d session(s) at snr_scale=%.4f", n_seeds, model.snr_scale)

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_simulate_one, model, s, mixing, export_features) for s in sessions]
            runs = [f.result() for f in futures]
    else:
        runs = [_simulate_one(model, s, mixing, export_features) for s in sessions]

    summary_rows = []
    with ResultWriter(cfg.output_dir(out)) as writer:
        for session, (result, records) in zip(sessions, runs):
            writer.write_session(result, name=f"session_seed{session.seed}.json")
            online = accuracy_report(result.online_decisions, result.truth)
            posthoc = accuracy_report(result.posthoc_decisions, result.truth)
            aucs = [o.auc for o in result.outcomes if o.auc is not None]
            summary_rows.append([
                session.seed, online.n_characters, online.accuracy, online.post_ramp_accuracy,
                posthoc.accuracy, float(np.mean(aucs)) if aucs else None,
            ])
            if records is not None:
                sub = ResultWriter(writer.out_dir / f"seed_{session.seed}")
                with sub:
                    sub.write_features(records, model.channel_names, len(model.intervals))
                    sub.write_trials(records, seed=session.seed, mixing=mixing, grid=session.grid,
                                     forgetting=session.forgetting, snr_scale=model.snr_scale)
                    sub.write_decisions(result)
                writer.written.extend(sub.written)
        writer.write_outcomes([r for r, _ in runs])
        writer.write_csv("summary.csv", (
            "seed", "n_characters", "online_accuracy", "post_ramp_accuracy",
            "posthoc_accuracy", "mean_auc",
        ), summary_rows)
        writer.write_csv("ramp_up.csv", ("index", "online_accuracy", "mean_auc", "mean_rmse"),
                         _ramp_rows([r for r, _ in runs]))
        writer.write_json("model.json", model.to_json_dict())

    if not _quiet(ctx):
        t = Table(box=box.SIMPLE, title=f"Simulation (snr_scale={model.snr_scale:.3f})")
        for col in ("Seed", "Online", "Post-ramp", "Post-hoc", "Mean AUC"):
            t.add_column(col, justify="right")
        for seed_, _, acc, post, ph, mean_auc in summary_rows:
            t.add_row(str(seed_), f"{acc:.3f}", "—" if post is None else f"{post:.3f}",
                      f"{ph:.3f}", "—" if mean_auc is None else f"{mean_auc:.3f}")
        console.print(t)


def _ramp_rows(results: list["SessionResult"]) -> list[list[Any]]:
    by_index: dict[int, list[Any]] = {}
    for r in results:
        for o in r.outcomes:
            by_index.setdefault(o.index, []).append(o)
    rows = []
    for index in sorted(by_index):
        outs = by_index[index]
        aucs = [o.auc for o in outs if o.auc is not None]
        rmses = [o.reconstruction_rmse for o in outs if o.reconstruction_rmse is not None]
        rows.append([
            index,
            float(np.mean([o.online_correct for o in outs])),
            float(np.mean(aucs)) if aucs else None,
            float(np.mean(rmses)) if rmses else None,
        ])
    return rows


# ---------------------------------------------------------------------------
# synthesize
# ---------------------------------------------------------------------------


@cli.command()
@click.option("--config", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True)
@click.option("--characters", type=click.IntRange(min=1), default=5, show_default=True)
@click.option("--rate", type=click.FloatRange(min=0.0, min_open=True), default=1000.0, show_default=True)
@click.option("--snr", type=click.FloatRange(min=0.0), default=1.0, show_default=True)
@click.option("--out", type=click.Path(file_okay=False, path_type=Path))
@click.pass_context
@_exit_codes
def synthesize(
    ctx: click.Context,
    config: Path | None,
    seed: int,
    characters: int,
    rate: float,
    snr: float,
    out: Path | None,
) -> None:
    """Write a synthetic raw recording (recording.csv + recording_markers.csv)."""
    from ..builder import TrialBuilder
    from ..formats import ResultWriter
    from ..simulation import synthesize_recording

    cfg = _load_cfg(config)
    grid = cfg.symbol_grid()
    symbols = cfg.session_config().symbols()[:characters]
    rng = np.random.default_rng(seed)
    trials = [
        TrialBuilder(grid).with_design(cfg.session.design).with_seed(int(rng.integers(2**63 - 1))).build()
        for _ in symbols
    ]
    rec = synthesize_recording(trials, symbols, grid=grid, rate=rate, snr_scale=snr,
                               seed=int(rng.integers(2**63 - 1)))
    with ResultWriter(cfg.output_dir(out)) as writer:
        data_path, marker_path = writer.write_recording(rec)
    if not _quiet(ctx):
        console.print(f"[green]✓[/green] {rec.n_channels} channels × {rec.n_samples} samples, "
                      f"{len(rec.markers)} markers → [bold]{data_path}[/bold], {marker_path.name}")


# ---------------------------------------------------------------------------
# evaluate
# ---------------------------------------------------------------------------


@cli.command()
@click.option("--config", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--recording", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--markers", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--rate", type=click.FloatRange(min=0.0, min_open=True), default=1000.0, show_default=True)
@click.option("--features", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--trials", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--matrix", "matrix_spec", default=None, help="Mixing matrix for the LLP decoder")
@click.option("--dataset", default="recording", show_default=True, help="Name used in reports")
@click.option("--out", type=click.Path(file_okay=False, path_type=Path))
@click.option("--json-output", is_flag=True, help="Print the report as JSON")
@click.pass_context
@_exit_codes
def evaluate(
    ctx: click.Context,
    config: Path | None,
    recording: Path | None,
    markers: Path | None,
    rate: float,
    features: Path | None,
    trials: Path | None,
    matrix_spec: str | None,
    dataset: str,
    out: Path | None,
    json_output: bool,
) -> None:
    """
    Analyse a recording (--recording/--markers) or replay the online
    decoder over exported features (--features/--trials).
    """
    cfg = _load_cfg(config)
    if features is not None or trials is not None:
        if features is None or trials is None:
            raise click.UsageError("--features and --trials must be given together")
        report = _evaluate_replay(cfg, features, trials, matrix_spec, out)
    elif recording is not None and markers is not None:
        report = _evaluate_recording(cfg, recording, markers, rate, matrix_spec, dataset, out)
    else:
        raise click.UsageError("give --recording and --markers, or --features and --trials")

    if json_output:
        click.echo(json.dumps(report, indent=2, default=str))
    elif not _quiet(ctx):
        t = Table(box=box.SIMPLE, title="Evaluation")
        t.add_column("Metric")
        t.add_column("Value", justify="right")
        for key, value in report.items():
            if isinstance(value, (dict, list)):
                continue
            t.add_row(key, f"{value:.4f}" if isinstance(value, float) else str(value))
        console.print(t)


def _evaluate_replay(
    cfg: "ExperimentConfig", features: Path, trials: Path, matrix_spec: str | None, out: Path | None
) -> dict[str, Any]:
    from ..evaluation import accuracy_report
    from ..formats import ResultWriter, load_trials, read_features_csv, records_from_export
    from ..simulation import replay_session

    session = load_trials(trials)
    table = read_features_csv(features)
    records = records_from_export(session, table)
    mixing = _parse_matrix(matrix_spec) if matrix_spec else session.mixing
    result = replay_session(records, mixing, grid=session.grid, seed=session.seed,
                            forgetting=session.forgetting, snr_scale=session.snr_scale)
    online = accuracy_report(result.online_decisions, result.truth)
    posthoc = accuracy_report(result.posthoc_decisions, result.truth)
    with ResultWriter(cfg.output_dir(out)) as writer:
        writer.write_decisions(result)
        writer.write_session(result, name="replay.json")
    return {
        "mode": "replay",
        "characters": online.n_characters,
        "online_accuracy": online.accuracy,
        "post_ramp_accuracy": online.post_ramp_accuracy,
        "posthoc_accuracy": posthoc.accuracy,
    }


def _evaluate_recording(
    cfg: "ExperimentConfig",
    recording: Path,
    markers: Path,
    rate: float,
    matrix_spec: str | None,
    dataset: str,
    out: Path | None,
) -> dict[str, Any]:
    from ..decoder import OnlineLLPState, train_llp
    from ..evaluation import (
        HomogeneityReport,
        bootstrap_homogeneity,
        chronological_cv,
        neurophysiology_row,
        signed_r2,
    )
    from ..formats import ResultWriter, read_recording_csv
    from ..preprocessing import preprocess_recording
    from ..simulation import llp_trainer

    rec = read_recording_csv(recording, rate, markers)
    data = preprocess_recording(rec, cfg.preprocessing)
    if not data.features:
        raise InsufficientDataError("no complete epochs in the recording")
    X = data.matrix()
    marks = data.markers()
    groups = np.array([m.group if m.group is not None else 0 for m in marks])
    labelled = all(m.label is not None for m in marks)
    grouped = bool(np.all(groups > 0))
    mixing = _parse_matrix(matrix_spec) if matrix_spec else cfg.mixing_matrix()

    report: dict[str, Any] = {
        "mode": "recording",
        "dataset": dataset,
        "epochs": int(X.shape[0]),
        "features": int(X.shape[1]),
        "skipped_markers": len(data.skipped),
    }
    with ResultWriter(cfg.output_dir(out)) as writer:
        if grouped:
            state = OnlineLLPState(d=X.shape[1], n_groups=mixing.n_groups)
            state.update_batch(X, groups)
            clf = train_llp(state, mixing)
            report["llp_gamma"] = clf.gamma
            writer.write_json("classifier.json", clf.to_snapshot())
        if labelled:
            y = np.array([m.label for m in marks], dtype=int)
            report["supervised_cv_auc"] = chronological_cv(X, y)
            if grouped:
                report["llp_cv_auc"] = chronological_cv(X, y, trainer=llp_trainer(mixing), groups=groups)
            names = data.features[0].names()
            writer.write_csv("signed_r2.csv", ("feature", "signed_r2"),
                             zip(names, (float(v) for v in signed_r2(X, y))))
            targets = [e for e, m in zip(data.epochs, marks) if m.label == 1]
            non_targets = [e for e, m in zip(data.epochs, marks) if m.label == -1]
            row = neurophysiology_row(dataset, targets, non_targets, report["supervised_cv_auc"])
            writer.write_csv("neurophysiology.csv", row.csv_header(), [row.csv_row()])
            report["neurophysiology"] = row.model_dump()
            if grouped:
                homogeneity = HomogeneityReport()
                for label in (1, -1):
                    g1 = [e for e, m in zip(data.epochs, marks) if m.label == label and m.group == 1]
                    g2 = [e for e, m in zip(data.epochs, marks) if m.label == label and m.group == 2]
                    try:
                        homogeneity.add(bootstrap_homogeneity(g1, g2, label, dataset=dataset))
                    except InsufficientDataError as exc:
                        logger.warning("homogeneity test for class %+d skipped: %s", label, exc)
                report["homogeneity"] = homogeneity.to_dict()
        else:
            logger.info("labels withheld; supervised metrics skipped")
        writer.write_json("report.json", report)
    return report


# ---------------------------------------------------------------------------
# naf-sweep
# ---------------------------------------------------------------------------


@cli.command("naf-sweep")
@click.option("--config", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--candidates", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="JSON list of mixing matrices (default: built-in candidate set)")
@click.option("--epochs", "n_epochs", type=click.IntRange(min=4), default=2160, show_default=True)
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True)
@click.option("--seeds", "n_seeds", type=click.IntRange(min=1), default=50, show_default=True)
@click.option("--snr", type=click.FloatRange(min=0.0), default=1.0, show_default=True)
@click.option("--auc/--no-auc", "with_auc", default=True, show_default=True,
              help="Measure LLP and supervised chronological-CV AUC per candidate")
@click.option("--out", type=click.Path(file_okay=False, path_type=Path))
@click.pass_context
@_exit_codes
def naf_sweep(
    ctx: click.Context,
    config: Path | None,
    candidates: Path | None,
    n_epochs: int,
    seed: int,
    n_seeds: int,
    snr: float,
    with_auc: bool,
    out: Path | None,
) -> None:
    """Mean class-mean reconstruction RMSE per candidate mixing matrix."""
    from ..formats import ResultWriter, read_json, validate_document
    from ..formats.schemas import MIXING_SCHEMA
    from ..models.mixing import MixingMatrix
    from ..simulation import SyntheticModel, candidate_mixings, naf_sweep as run_sweep

    cfg = _load_cfg(config)
    if candidates is not None:
        doc = read_json(candidates)
        if not isinstance(doc, list) or not doc:
            raise FormatError("expected a non-empty JSON list of mixing matrices", path=candidates)
        matrices = []
        for item in doc:
            item = {"rows": item} if isinstance(item, list) else item
            validate_document(item, MIXING_SCHEMA, candidates)
            matrices.append(MixingMatrix.model_validate(item))
    else:
        matrices = candidate_mixings()

    ms = cfg.model
    model = SyntheticModel.default(seed=ms.seed, rank=ms.rank, loading=ms.loading, snr_scale=snr)
    rows = run_sweep(matrices, model, n_epochs, range(seed, seed + n_seeds), evaluate_auc=with_auc)
    with ResultWriter(cfg.output_dir(out)) as writer:
        writer.write_csv(
            "naf_sweep.csv",
            ("label", "n_groups", "naf", "n_epochs", "n_seeds", "mean_rmse", "std_rmse",
             "llp_auc", "supervised_auc"),
            ([r.label, len(r.rows), r.naf, r.n_epochs, r.n_seeds, r.mean_rmse, r.std_rmse,
              r.llp_auc, r.supervised_auc] for r in rows),
        )
    if not _quiet(ctx):
        t = Table(box=box.SIMPLE, title=f"NAF sweep ({n_epochs} epochs, {n_seeds} seeds)")
        for col in ("Matrix", "G", "NAF", "RMSE", "LLP AUC"):
            t.add_column(col, justify="right")
        for r in sorted(rows, key=lambda r: r.naf):
            t.add_row(r.label, str(len(r.rows)), f"{r.naf:.2f}", f"{r.mean_rmse:.4f}",
                      "—" if r.llp_auc is None else f"{r.llp_auc:.3f}")
        console.print(t)


# ---------------------------------------------------------------------------
# version info
# ---------------------------------------------------------------------------


@cli.command("version")
def show_version() -> None:
    """Show version information."""
    console.print(Panel(
        f"[bold cyan]llp-speller[/bold cyan] v{__version__}\n\n"
        "Learning from label proportions for ERP spellers\n"
        "Mean-map decoding · interleaved sequence design · session simulation\n\n"
        "License:  Apache 2.0",
        title="llp-speller",
        border_style="cyan",
    ))
