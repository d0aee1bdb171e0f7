"""`tutor` command line: ingest, simulate, analyze, report, serve.

Exit codes: 0 on success, 1 on validation/domain errors, 2 on storage errors
(unreadable or corrupt event logs, unwritable outputs).
"""

from __future__ import annotations

import csv
import functools
import json
import sys
from dataclasses import replace
from pathlib import Path

import click

from .engine import EngineConfig, TutorEngine
from .errors import StorageError, StorageFailure, TutorError
from .learner_model import Dimension
from .reports import analyze_log, word_status_for_class, word_status_for_learner
from .sim import SimConfig, build_pilot, run_pilot
from .stats import AnalysisParams
from .store import read_event_log
from .wordweb import dump_wordweb, load_wordweb

__all__ = ["main"]


def _handle_errors(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except StorageError as err:
            click.echo(f"storage error: {err}", err=True)
            sys.exit(2)
        except OSError as err:
            click.echo(f"storage error: {err}", err=True)
            sys.exit(2)
        except (TutorError, ValueError) as err:
            click.echo(f"error: {err}", err=True)
            sys.exit(1)
    return wrapper


@click.group()
def main():
    """Vocabulary tutor: content ingestion, pilot simulation, and analysis."""


@main.command()
@click.argument("wordweb_path", type=click.Path())
@_handle_errors
def ingest(wordweb_path):
    """Validate a word-web JSON file and print a content summary."""
    web = load_wordweb(wordweb_path)
    click.echo(f"{wordweb_path}: OK")
    click.echo(f"  words:     {len(web)}")
    click.echo(f"  relations: {len(web.relations())}")
    click.echo(f"  media:     {len(web.media_assets())}")


def _load_sim_config(config_path) -> SimConfig:
    if config_path is None:
        return SimConfig()
    with open(config_path, "r", encoding="utf-8") as fh:
        return SimConfig.from_dict(json.load(fh))


@main.command()
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--classes", type=int, default=None, help="Number of classes (even).")
@click.option("--learners-per-class", type=int, default=None)
@click.option("--words", type=int, default=None)
@click.option("--days", type=int, default=None)
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="JSON file with simulation/engine parameters.")
@click.option("--out", "out_path", type=click.Path(), required=True,
              help="Event log output (JSON Lines).")
@click.option("--snapshots", "snapshots_path", type=click.Path(), default=None,
              help="Snapshots CSV output (default: <out>.snapshots.csv).")
@_handle_errors
def simulate(seed, classes, learners_per_class, words, days, config_path,
             out_path, snapshots_path):
    """Run a synthetic pilot and emit its event log, snapshots, and word web."""
    config = _load_sim_config(config_path)
    overrides = {}
    if classes is not None:
        overrides["num_classes"] = classes
    if learners_per_class is not None:
        overrides["learners_per_class"] = learners_per_class
    if words is not None:
        overrides["num_words"] = words
    if days is not None:
        overrides["duration_days"] = days
    if overrides:
        config = replace(config, **overrides)

    out = Path(out_path)
    snapshots = Path(snapshots_path) if snapshots_path else out.with_suffix(".snapshots.csv")
    wordweb_out = out.with_suffix(".wordweb.json")

    scenario = build_pilot(config, seed)
    result = run_pilot(scenario, snapshots_path=snapshots)
    scenario.engine.store.write_jsonl(out)
    try:
        with open(wordweb_out, "w", encoding="utf-8") as fh:
            json.dump(dump_wordweb(scenario.web), fh, indent=1)
    except OSError as err:
        raise StorageFailure(f"cannot write {wordweb_out}: {err}") from err

    n_events = len(scenario.engine.store)
    n_learners = len(scenario.profiles)
    click.echo(f"simulated {config.duration_days} days, {n_learners} learners, "
               f"{len(scenario.web)} words (seed {seed})")
    click.echo(f"  event log: {out} ({n_events} events)")
    click.echo(f"  snapshots: {snapshots}")
    click.echo(f"  word web:  {wordweb_out}")


@main.command()
@click.option("--log", "log_path", type=click.Path(), required=True)
@click.option("--tau", type=int, default=3, show_default=True,
              help="Minimum responses per learner per word.")
@click.option("--eta", type=int, default=10, show_default=True,
              help="Minimum admitted learners per group.")
@click.option("--level", type=float, default=0.1, show_default=True,
              help="One-sided significance level.")
@click.option("--out", "out_path", type=click.Path(), required=True,
              help="Per-word report CSV output.")
@_handle_errors
def analyze(log_path, tau, eta, level, out_path):
    """Per-word A/B analysis of an event log."""
    events = read_event_log(log_path)
    params = AnalysisParams(min_responses=tau, min_learners=eta, significance_level=level)
    rows = analyze_log(events, params)
    try:
        with open(out_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow([
                "word", "experimentalGroup", "controlGroup",
                "nControl", "nExperimental", "controlMean", "experimentalMean",
                "tStat", "tP", "tReject", "ksStat", "ksP", "ksReject",
                "skippedReason",
            ])
            for r in rows:
                if r.analyzable:
                    writer.writerow([
                        r.word_id, r.experimental_group_id, r.control_group_id,
                        r.n_control, r.n_experimental,
                        f"{r.control_mean:.6f}", f"{r.experimental_mean:.6f}",
                        f"{r.t_result.statistic:.6f}", f"{r.t_result.p_value:.6g}",
                        int(r.t_result.reject_null),
                        f"{r.ks_result.statistic:.6f}", f"{r.ks_result.p_value:.6g}",
                        int(r.ks_result.reject_null), "",
                    ])
                else:
                    writer.writerow([r.word_id, r.experimental_group_id,
                                     r.control_group_id, "", "", "", "", "", "",
                                     "", "", "", "", r.skipped_reason])
    except OSError as err:
        raise StorageFailure(f"cannot write {out_path}: {err}") from err
    analyzable = [r for r in rows if r.analyzable]
    rejected = sum(1 for r in analyzable if r.t_result.reject_null)
    click.echo(f"{len(rows)} words: {len(analyzable)} analyzable, "
               f"{len(rows) - len(analyzable)} skipped, "
               f"{rejected} significant at level {level}")
    click.echo(f"  report: {out_path}")


def _replay_engine(log_path, wordweb_path) -> TutorEngine:
    web = load_wordweb(wordweb_path)
    events = read_event_log(log_path)
    return TutorEngine.replay(events, web, config=EngineConfig())


@main.command()
@click.option("--log", "log_path", type=click.Path(), required=True)
@click.option("--wordweb", "wordweb_path", type=click.Path(), required=True)
@click.option("--class", "class_id", default=None, help="Class-level report.")
@click.option("--learner", "learner_id", default=None, help="Learner-level report.")
@click.option("--dimension", default=Dimension.LISTENING.value, show_default=True)
@_handle_errors
def report(log_path, wordweb_path, class_id, learner_id, dimension):
    """Word-status report for one class or one learner."""
    if (class_id is None) == (learner_id is None):
        raise TutorError("give exactly one of --class or --learner")
    engine = _replay_engine(log_path, wordweb_path)
    dim = Dimension(dimension)
    if learner_id is not None:
        rows = word_status_for_learner(engine, learner_id, dim)
        click.echo(f"learner {learner_id} ({dimension}):")
        click.echo(f"{'word':<16} {'phase':<16} {'score':>7} {'asked':>5} {'seen':>5}")
        for r in rows:
            click.echo(f"{r.lemma:<16} {r.phase.value:<16} {r.score:>7.3f} "
                       f"{r.assessment_count:>5} {r.learning_exposures:>5}")
    else:
        rows = word_status_for_class(engine, class_id, dim)
        click.echo(f"class {class_id} ({dimension}), worst-answered words first:")
        click.echo(f"{'rank':>4} {'word':<16} {'correct':>8} {'answers':>8} {'meanScore':>10}")
        for r in rows:
            rate = f"{r.mean_correct_rate:.2f}" if r.mean_correct_rate is not None else "-"
            click.echo(f"{r.priority_rank:>4} {r.lemma:<16} {rate:>8} "
                       f"{r.response_count:>8} {r.mean_score:>10.3f}")


@main.command()
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--wordweb", "wordweb_path", type=click.Path(), required=True)
@click.option("--log", "log_path", type=click.Path(), default=None,
              help="Event log to replay into the served engine.")
@_handle_errors
def serve(port, host, wordweb_path, log_path):
    """Serve the engine API over HTTP."""
    import uvicorn

    from .service import create_app

    if log_path is not None:
        engine = _replay_engine(log_path, wordweb_path)
    else:
        engine = TutorEngine(load_wordweb(wordweb_path))
    uvicorn.run(create_app(engine), host=host, port=port)


if __name__ == "__main__":
    main()
