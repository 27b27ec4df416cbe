"""Command-line entry points: batch simulation, offline recommendations,
the comparison report, decision charts, and the conduct service."""

from __future__ import annotations

import json
import sys

import click

from .core import StudyConfig, TrialError, load_scenario
from .designs import DESIGN_CLASSES
from .designs.interval import boundary_table
from .engine import DesignSpec, metrics_from_csv, metrics_to_csv, run_study

EXIT_CONFIG = 2
EXIT_RUNTIME = 3


@click.group()
def main():
    """Combination-agent phase I dose-finding toolkit."""


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_study_config(path: str, seed, reps, early_stop) -> tuple[StudyConfig, list[DesignSpec], list]:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        _fail(EXIT_CONFIG, f"cannot read config: {exc}")
    except json.JSONDecodeError as exc:
        _fail(EXIT_CONFIG, f"config is not valid JSON (line {exc.lineno}, column {exc.colno}): {exc.msg}")
    try:
        config = StudyConfig(
            phi=float(obj.get("phi", 0.3)),
            max_n=int(obj.get("max_n", 60)),
            cohort_size=int(obj.get("cohort_size", 3)),
            early_stop_n=early_stop if early_stop is not None else obj.get("early_stop_n"),
            reps=int(reps if reps is not None else obj.get("reps", 2000)),
            seed=int(seed if seed is not None else obj.get("seed", 0)),
        )
    except (TrialError, TypeError, ValueError) as exc:
        _fail(EXIT_CONFIG, f"invalid study settings: {exc}")
    designs = []
    for d in obj.get("designs", []):
        if isinstance(d, str):
            d = {"id": d}
        design_id = d.get("id")
        if design_id not in DESIGN_CLASSES:
            _fail(EXIT_CONFIG, f"unknown design id '{design_id}'; valid ids: {', '.join(sorted(DESIGN_CLASSES))}")
        params = {k: v for k, v in d.items() if k != "id"}
        designs.append(DesignSpec(design_id, params))
    if not designs:
        _fail(EXIT_CONFIG, "config lists no designs")
    scenarios = []
    for ref in obj.get("scenarios", []):
        try:
            scenarios.append(load_scenario(ref))
        except (OSError, TrialError, json.JSONDecodeError) as exc:
            _fail(EXIT_CONFIG, f"cannot load scenario '{ref}': {exc}")
    if not scenarios:
        _fail(EXIT_CONFIG, "config lists no scenarios")
    for sc in scenarios:
        if not sc.monotone:
            click.echo(f"warning: scenario '{sc.name}' is not monotone in both agents", err=True)
    return config, designs, scenarios


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(), help="Study config JSON.")
@click.option("--out", "out_path", required=True, type=click.Path(), help="Results CSV path.")
@click.option("--seed", type=int, default=None, help="Override the config's base seed (default 0).")
@click.option("--reps", type=int, default=None, help="Override the replication count.")
@click.option("--threads", type=int, default=1, show_default=True, help="Worker processes.")
@click.option("--early-stop", type=int, default=None, help="Per-dose patient cap enabling early stopping.")
def simulate(config_path, out_path, seed, reps, threads, early_stop):
    """Run a Monte Carlo study from a config file and write a results CSV."""
    config, designs, scenarios = _load_study_config(config_path, seed, reps, early_stop)
    try:
        rows = run_study(designs, scenarios, config, threads=threads)
    except Exception as exc:  # noqa: BLE001 - surfaced with exit code 3
        _fail(EXIT_RUNTIME, f"simulation aborted: {exc}")
    with open(out_path, "w") as fh:
        fh.write(metrics_to_csv(rows))
    click.echo(f"wrote {len(rows)} rows to {out_path}")


@main.command()
@click.option("--history", "history_path", required=True, type=click.Path(), help="History JSON file.")
def decide(history_path):
    """Print the next-dose recommendation for an exported trial history."""
    from .conduct import decide_from_history, load_history

    try:
        obj = load_history(history_path)
        out = decide_from_history(obj)
    except OSError as exc:
        _fail(EXIT_CONFIG, f"cannot read history: {exc}")
    except (TrialError, KeyError, ValueError) as exc:
        _fail(EXIT_CONFIG, f"inconsistent history: {exc}")
    click.echo(json.dumps(out, indent=2))


@main.command()
@click.option("--results", "results_path", required=True, type=click.Path(), help="Results CSV from simulate.")
@click.option("--out", "out_path", type=click.Path(), default=None, help="Output path (default stdout).")
@click.option("--format", "fmt", type=click.Choice(["markdown", "csv"]), default="markdown", show_default=True)
@click.option("--table", type=click.Choice(["main", "early_stop"]), default="main", show_default=True,
              help="Reference table to compare against.")
def report(results_path, out_path, fmt, table):
    """Compare a results CSV against the bundled reference values."""
    from .report import compare, comparison_csv, comparison_markdown

    try:
        with open(results_path) as fh:
            rows = metrics_from_csv(fh.read())
    except OSError as exc:
        _fail(EXIT_CONFIG, f"cannot read results: {exc}")
    except (KeyError, ValueError) as exc:
        _fail(EXIT_CONFIG, f"malformed results CSV: {exc}")
    cells, warnings = compare(rows, table)
    text = comparison_markdown(cells, warnings) if fmt == "markdown" else comparison_csv(cells, warnings)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
        click.echo(f"wrote report to {out_path}")
    else:
        click.echo(text, nl=False)
    for w in warnings:
        click.echo(f"warning: {w}", err=True)


@main.command("boundary-table")
@click.option("--phi", type=float, default=0.3, show_default=True, help="Target toxicity probability.")
@click.option("--max-n", "max_patients", type=int, default=30, show_default=True, help="Largest per-dose count.")
@click.option("--design", type=click.Choice(["cboin", "ckeyboard"]), default="cboin", show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None, help="Output path (default stdout).")
def boundary_table_cmd(phi, max_patients, design, out_path):
    """Emit the pre-tabulated escalate/de-escalate chart as CSV."""
    try:
        text = boundary_table(phi, max_patients, design)
    except ValueError as exc:
        _fail(EXIT_CONFIG, str(exc))
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
        click.echo(f"wrote chart to {out_path}")
    else:
        click.echo(text, nl=False)


@main.command()
def designs():
    """List the available design ids."""
    for design_id in sorted(DESIGN_CLASSES):
        click.echo(design_id)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--data-dir", type=click.Path(), default="./trial-sessions", show_default=True,
              help="Directory for session event logs.")
def serve(host, port, data_dir):
    """Start the trial-conduct HTTP service (backs the web console)."""
    import uvicorn

    from .api.app import create_app

    uvicorn.run(create_app(data_dir), host=host, port=port)


if __name__ == "__main__":
    main()
