"""Command-line entry point.

Subcommands: weights-derive (questionnaires -> weight tables), score
(inventory + snapshot -> per-area report), compare (two score sets),
fixture (synthetic data), serve (HTTP facade). Exit codes: 0 success,
1 validation failure, 2 I/O failure.

GRIDOBS_CONFIG may point to a JSON file providing flag defaults
(tables, policy, format, method, aggregation, cr_threshold).
"""
from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import ahp, report, scoring, service, store
from .errors import GridObsError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


def _load_config() -> dict:
    path = os.environ.get("GRIDOBS_CONFIG")
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise GridObsError("config file must hold a JSON object")
    return cfg


def _policy_from_option(text: str | None, config: dict) -> scoring.InvalidityPolicy:
    if text is None:
        text = config.get("policy")
    if text is None:
        return scoring.DEFAULT_POLICY
    if isinstance(text, dict):
        return scoring.InvalidityPolicy.from_json(text)
    candidate = Path(text)
    if text.startswith("@"):
        candidate = Path(text[1:])
        obj = json.loads(candidate.read_text(encoding="utf-8"))
    else:
        try:
            obj = json.loads(text)
        except json.JSONDecodeError:
            if candidate.exists():
                obj = json.loads(candidate.read_text(encoding="utf-8"))
            else:
                raise GridObsError(f"--policy is neither JSON nor a file: {text!r}") from None
    try:
        return scoring.InvalidityPolicy.from_json(obj)
    except ValueError as e:
        raise GridObsError(str(e)) from None


def _load_tables(path: str | None, config: dict) -> ahp.WeightTables:
    path = path or config.get("tables")
    if path is None:
        return store.paper_tables()
    return store.load_weight_tables(path)


@click.group()
def cli():
    """Weighted observability scoring for grid telemetry signals."""


@cli.command("weights-derive")
@click.argument("questionnaires", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False),
              help="Write the derived weight tables JSON here.")
@click.option("--method", type=click.Choice(["geometric-mean", "eigenvector"]),
              default=None, help="Priority derivation method.")
@click.option("--aggregation", type=click.Choice(["priorities", "judgments"]),
              default=None, help="Average expert priorities, or combine judgments first.")
@click.option("--cr-threshold", type=float, default=None,
              help="Consistency-ratio threshold (default 0.10).")
@click.option("--format", "fmt", type=click.Choice(["json", "text", "csv"]), default=None)
@click.option("--strict", is_flag=True, help="Treat consistency warnings as errors.")
def weights_derive(questionnaires, output, method, aggregation, cr_threshold, fmt, strict):
    """Derive weight tables from expert questionnaire files."""
    config = _load_config()
    method = method or config.get("method", "geometric-mean")
    aggregation = aggregation or config.get("aggregation", "priorities")
    cr_threshold = cr_threshold if cr_threshold is not None else config.get(
        "cr_threshold", ahp.DEFAULT_CR_THRESHOLD)
    fmt = fmt or config.get("format", "text")
    qs = [store.load_questionnaire(p) for p in questionnaires]
    build = ahp.build_weight_tables(qs, method=method, aggregation=aggregation,
                                    cr_threshold=cr_threshold)
    if output:
        store.save_weight_tables(build.tables, output)
    doc = report.build_weights_report(build, cr_threshold)
    click.echo(report.render(doc, fmt), nl=False)
    if build.warnings:
        for w in build.warnings:
            click.echo(
                f"warning: {w.context.label()} expert {w.expert_id} "
                f"CR={w.report.consistency_ratio:.4f}",
                err=True,
            )
        if strict:
            raise GridObsError(f"{len(build.warnings)} matrices over the CR threshold")


@cli.command("score")
@click.option("--inventory", "inventory_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--snapshot", "snapshot_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--tables", "tables_path", type=click.Path(exists=True, dir_okay=False),
              help="Weight tables JSON (bundled published tables if omitted).")
@click.option("--policy", "policy_text", default=None,
              help="Invalidity policy as inline JSON or @file.")
@click.option("--group-by", type=click.Choice(["area", "station"]), default="area")
@click.option("--format", "fmt", type=click.Choice(["json", "text", "csv"]), default=None)
@click.option("--save", "save_path", type=click.Path(dir_okay=False),
              help="Also write the full-precision score document here.")
@click.option("--history", "history_dir", type=click.Path(file_okay=False),
              help="Append the scores to this history store.")
@click.option("--snapshot-id", default=None, help="Override the snapshot id.")
def score(inventory_path, snapshot_path, tables_path, policy_text, group_by, fmt,
          save_path, history_dir, snapshot_id):
    """Score a snapshot against an inventory, per area or station."""
    config = _load_config()
    fmt = fmt or config.get("format", "text")
    policy = _policy_from_option(policy_text, config)
    tables = _load_tables(tables_path, config)
    inventory = store.load_inventory(inventory_path)
    snapshot = store.load_snapshot(snapshot_path, inventory,
                                   snapshot_id=snapshot_id,
                                   on_missing=policy.on_missing)
    if group_by == "area":
        scores = scoring.score_by_area(inventory.signals, snapshot.records, tables, policy)
    else:
        scores = scoring.score_by_station(inventory.signals, snapshot.records, tables, policy)
    if save_path:
        store.save_scores(save_path, snapshot.snapshot_id, snapshot.taken_at, scores)
    if history_dir:
        store.persist_scores(store.HistoryStore(history_dir), snapshot.snapshot_id,
                             scores, snapshot.taken_at)
    doc = report.build_scores_report(scores, group_by)
    click.echo(report.render(doc, fmt), nl=False)


@cli.command("compare")
@click.argument("score_files", nargs=-1, type=click.Path(exists=True, dir_okay=False))
@click.option("--history", "history_dir", type=click.Path(exists=True, file_okay=False),
              help="Resolve the two ids from this history store instead of files.")
@click.option("--ids", nargs=2, default=None, help="Snapshot ids (with --history).")
@click.option("--format", "fmt", type=click.Choice(["json", "text", "csv"]), default=None)
def compare(score_files, history_dir, ids, fmt):
    """Compare two stored score sets (files, or history ids)."""
    config = _load_config()
    fmt = fmt or config.get("format", "text")
    if history_dir:
        if not ids:
            raise GridObsError("--history needs --ids BEFORE AFTER")
        h = store.HistoryStore(history_dir)
        before_id, _, before = h.get(ids[0])
        after_id, _, after = h.get(ids[1])
    else:
        if len(score_files) != 2:
            raise GridObsError("compare needs exactly two score files (or --history --ids)")
        before_id, _, before = store.load_scores(score_files[0])
        after_id, _, after = store.load_scores(score_files[1])
    comparison = scoring.compare_snapshots(before, after)
    doc = report.build_comparison_report(comparison, before_id, after_id)
    click.echo(report.render(doc, fmt), nl=False)


@cli.command("fixture")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Fixture config JSON: {seed, areas, stations_per_area, "
                   "signals_per_station, fault_rate, instruction_rate}.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def fixture(config_path, out_dir):
    """Generate a seeded synthetic inventory and snapshot."""
    with open(config_path, encoding="utf-8") as fh:
        cfg = store.FixtureConfig.from_json(json.load(fh))
    inventory, snapshot = store.generate_fixture(cfg)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    store.save_inventory(inventory, out / "inventory.csv")
    store.save_snapshot(snapshot, out / "snapshot.csv")
    click.echo(f"wrote {len(inventory.signals)} signals to {out}")


@cli.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8321, show_default=True, type=int)
@click.option("--tables", "tables_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--inventory", "inventory_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--snapshot", "snapshot_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--policy", "policy_text", default=None)
@click.option("--store", "store_dir", type=click.Path(file_okay=False),
              default="questionnaires", show_default=True,
              help="Directory for posted questionnaires.")
@click.option("--method", type=click.Choice(["geometric-mean", "eigenvector"]),
              default="geometric-mean", show_default=True)
@click.option("--cr-threshold", type=float, default=ahp.DEFAULT_CR_THRESHOLD,
              show_default=True)
def serve(host, port, tables_path, inventory_path, snapshot_path, policy_text,
          store_dir, method, cr_threshold):
    """Run the HTTP facade (loopback by default; unauthenticated)."""
    config = _load_config()
    state = service.ServiceState(
        questionnaire_dir=Path(store_dir),
        method=method,
        cr_threshold=cr_threshold,
    )
    try:
        state.tables = _load_tables(tables_path, config)
    except GridObsError:
        state.tables = None
    if inventory_path and snapshot_path:
        policy = _policy_from_option(policy_text, config)
        inventory = store.load_inventory(inventory_path)
        snapshot = store.load_snapshot(snapshot_path, inventory,
                                       on_missing=policy.on_missing)
        scores = scoring.score_by_area(inventory.signals, snapshot.records,
                                       state.tables, policy)
        state.latest_report = report.build_scores_report(scores, "area")
    click.echo(f"serving on http://{host}:{port}", err=True)
    service.serve_forever(state, host, port)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return EXIT_OK
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_VALIDATION
    except click.exceptions.ClickException as e:
        e.show()
        return EXIT_VALIDATION
    except GridObsError as e:
        click.echo(f"error: {e}", err=True)
        return EXIT_VALIDATION
    except OSError as e:
        click.echo(f"i/o error: {e}", err=True)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
