# main.py
import json
import logging
import sys

import click

from app.config import ExperimentConfig, expand_sweep, list_recipes, load_raw
from app.experiment_manager import ExperimentManager, analyze_report, summarize, write_csv
from core.errors import ConfigError, ParArmError

logger = logging.getLogger("pararm")


def _load_single(path):
    raw = load_raw(path)
    if "sweep" in raw:
        raise ConfigError(f"{path} defines a sweep; use `pararm sweep` instead")
    return ExperimentConfig.from_dict(raw)


def _emit_rows(rows, out, timing):
    if out:
        write_csv(rows, out, include_timing=timing)
        logger.info(f"Wrote {len(rows)} rows to {out}")
    else:
        write_csv(rows, sys.stdout, include_timing=timing)


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Log per-round detail.")
def pararm(verbose):
    """Best-arm identification under sublinear resource scaling, in virtual time."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)


@pararm.command()
@click.option("--config", "config_path", required=True, help="Config file or shipped recipe name.")
@click.option("--out", type=click.Path(dir_okay=False), help="Result CSV (default: stdout).")
@click.option("--summary", type=click.Path(dir_okay=False), help="Also write the per-algorithm summary CSV.")
@click.option("--trace-dir", type=click.Path(file_okay=False), help="Write per-run round/stage traces and instance JSON here.")
@click.option("--workers", type=int, default=None, help="Override the config's worker count.")
@click.option("--timing", is_flag=True, help="Record wall_seconds (makes output non-reproducible).")
@click.option("--progress/--no-progress", default=False)
def run(config_path, out, summary, trace_dir, workers, timing, progress):
    """Run every (algorithm, replication) pair of one experiment."""
    try:
        config = _load_single(config_path)
        manager = ExperimentManager(config, workers=workers, progress=progress, keep_traces=bool(trace_dir))
        rows = manager.run_experiment()
    except ParArmError as e:
        raise click.ClickException(str(e))
    _emit_rows(rows, out, timing)
    if summary:
        summarize(rows).to_csv(summary, index=False)
    if trace_dir:
        written = manager.write_traces(trace_dir)
        logger.info(f"Wrote {len(written)} trace files to {trace_dir}")


@pararm.command()
@click.option("--config", "config_path", required=True, help="Config file or shipped recipe name.")
@click.option("--out", type=click.Path(dir_okay=False), help="Result CSV (default: stdout).")
@click.option("--summary", type=click.Path(dir_okay=False), help="Also write the per-algorithm summary CSV.")
@click.option("--workers", type=int, default=None)
@click.option("--timing", is_flag=True)
@click.option("--list", "list_only", is_flag=True, help="Print the expanded grid and exit.")
@click.option("--progress/--no-progress", default=False)
def sweep(config_path, out, summary, workers, timing, list_only, progress):
    """Expand the config's sweep grid and run every point."""
    try:
        points = expand_sweep(load_raw(config_path))
        if list_only:
            for point in points:
                click.echo(json.dumps(point, sort_keys=True))
            return
        rows = []
        for point in points:
            config = ExperimentConfig.from_dict(point)
            rows.extend(ExperimentManager(config, workers=workers, progress=progress).run_experiment())
    except ParArmError as e:
        raise click.ClickException(str(e))
    _emit_rows(rows, out, timing)
    if summary:
        summarize(rows).to_csv(summary, index=False)


@pararm.command()
@click.option("--config", "config_path", required=True, help="Config file or shipped recipe name.")
def analyze(config_path):
    """Print the planner value, schedule and bounds as JSON."""
    try:
        points = expand_sweep(load_raw(config_path))
        reports = [analyze_report(ExperimentConfig.from_dict(point)) for point in points]
    except ParArmError as e:
        raise click.ClickException(str(e))
    click.echo(json.dumps(reports[0] if len(reports) == 1 else reports, indent=2))


@pararm.command()
def recipes():
    """List the shipped experiment recipes."""
    for name in list_recipes():
        click.echo(name)


@pararm.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=5000, type=int)
def serve(host, port):
    """Serve the JSON API (recipes, analyze, run)."""
    from app.app import app
    logger.info(f"Serving pararm API on http://{host}:{port}")
    app.run(host=host, port=port)


if __name__ == '__main__':
    pararm()
