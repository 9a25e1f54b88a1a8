"""Command-line entry point: serve the API, run cost experiments, simulate
operation timelines, and seed demo fixtures.

Exit codes: 0 success, 2 configuration/usage error, 1 runtime error.
"""

from __future__ import annotations

import csv
import functools
import sys
from pathlib import Path

import click

from .config import AppConfig
from .costmodel import (
    CostParams,
    Operation,
    SystemKind,
    TimelineEvent,
    format_cost,
    run_cost_experiment,
    scenario_totals,
    simulate_timeline,
)
from .errors import CmsError, ConfigurationError, ValidationError
from .seeding import seed_demo


def cli_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConfigurationError as exc:
            click.echo(f"configuration error: {exc}", err=True)
            sys.exit(2)
        except (CmsError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


@click.group()
def main() -> None:
    """Content management service for user-driven three-screen delivery."""


@main.command()
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None,
              help="JSON config file.")
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.option("--data-dir", type=click.Path(path_type=Path), default=None)
@click.option("--user-file", type=click.Path(path_type=Path), default=None)
@cli_errors
def serve(config_path: Path | None, host: str | None, port: int | None,
          data_dir: Path | None, user_file: Path | None) -> None:
    """Run the HTTP service until interrupted."""
    import uvicorn

    from .api import create_app

    config = AppConfig.load(config_path) if config_path else AppConfig()
    if host is not None:
        config.host = host
    if port is not None:
        config.port = port
    if data_dir is not None:
        config.data_dir = data_dir
    if user_file is not None:
        config.user_file = user_file
    app = create_app(config)
    services = app.state.services
    if services.interrupted_jobs:
        click.echo(f"marked {services.interrupted_jobs} interrupted job(s) as Failed")
    try:
        uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    except SystemExit:
        raise
    except Exception as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


def _params(n: int, u: int, delta: float, c_agg: float, c_med: float, c_dep: float,
            alpha: float, beta: float, gamma: float) -> CostParams:
    return CostParams(
        n_content=n, subscribers=u, delta=delta,
        c_agg=c_agg, c_med=c_med, c_dep=c_dep,
        alpha=alpha, beta=beta, gamma=gamma,
    )


_cost_options = [
    click.option("--N", "n", type=int, default=1000, show_default=True,
                 help="Catalog size."),
    click.option("--U", "u", type=int, default=10000, show_default=True,
                 help="Subscriber count."),
    click.option("--delta", type=float, default=0.271, show_default=True,
                 help="Zipf popularity exponent."),
    click.option("--c-agg", type=float, default=0.2, show_default=True),
    click.option("--c-med", type=float, default=0.7, show_default=True),
    click.option("--c-dep", type=float, default=0.1, show_default=True),
    click.option("--alpha", type=float, default=0.5, show_default=True),
    click.option("--beta", type=float, default=0.3, show_default=True),
    click.option("--gamma", type=float, default=0.2, show_default=True),
]


def cost_options(fn):
    for option in reversed(_cost_options):
        fn = option(fn)
    return fn


@main.command("cost-experiment")
@cost_options
@click.option("--out", type=click.Path(path_type=Path), required=True,
              help="CSV output path.")
@click.option("--summary", is_flag=True, help="Also print the six scenario totals.")
@cli_errors
def cost_experiment(n, u, delta, c_agg, c_med, c_dep, alpha, beta, gamma,
                    out: Path, summary: bool) -> None:
    """Emit the rank-by-rank cost comparison table as CSV."""
    try:
        params = _params(n, u, delta, c_agg, c_med, c_dep, alpha, beta, gamma)
    except ValidationError as exc:
        raise ConfigurationError(str(exc)) from exc
    rows = run_cost_experiment(params, out)
    click.echo(f"wrote {rows} rows to {out}")
    if summary:
        for (system, scenario), total in sorted(scenario_totals(params).items()):
            click.echo(f"{system} scenario {scenario}: total {format_cost(total)}")


_OPERATIONS = {op.value: op for op in Operation}


def _load_schedule(path: Path | None) -> list[TimelineEvent]:
    if path is None:
        return []
    events = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row_number, row in enumerate(csv.reader(fh), 1):
            if not row or not "".join(row).strip():
                continue
            if row_number == 1 and [c.strip().lower() for c in row[:2]] == ["step", "operation"]:
                continue
            if len(row) < 2:
                raise ConfigurationError(f"{path}:{row_number}: expected step,operation")
            step_text, op_text = row[0].strip(), row[1].strip()
            if not step_text.lstrip("-").isdigit():
                raise ConfigurationError(f"{path}:{row_number}: bad step {step_text!r}")
            operation = _OPERATIONS.get(op_text)
            if operation is None:
                raise ConfigurationError(
                    f"{path}:{row_number}: operation must be one of {sorted(_OPERATIONS)}"
                )
            events.append(TimelineEvent(time=int(step_text), operation=operation))
    return events


@main.command()
@cost_options
@click.option("--schedule", type=click.Path(path_type=Path, exists=True), default=None,
              help="CSV of step,operation events.")
@click.option("--system", type=click.Choice([s.value for s in SystemKind]), required=True)
@click.option("--horizon", type=int, default=10, show_default=True)
@click.option("--out", type=click.Path(path_type=Path), required=True,
              help="CSV output path (step,cost).")
@cli_errors
def timeline(n, u, delta, c_agg, c_med, c_dep, alpha, beta, gamma,
             schedule: Path | None, system: str, horizon: int, out: Path) -> None:
    """Simulate per-step server operation costs for a workload schedule."""
    try:
        params = _params(n, u, delta, c_agg, c_med, c_dep, alpha, beta, gamma)
        events = _load_schedule(schedule)
        series = simulate_timeline(events, SystemKind(system), horizon, params)
    except ValidationError as exc:
        raise ConfigurationError(str(exc)) from exc
    with open(out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("step", "cost"))
        for step, cost in series:
            writer.writerow((step, format_cost(cost)))
    click.echo(f"wrote {len(series)} steps to {out}")


@main.command("seed-demo")
@click.option("--data-dir", type=click.Path(path_type=Path), required=True)
@click.option("--base-url", default="http://127.0.0.1:8642", show_default=True,
              help="Base URL the service will be reachable at (for fixture feed links).")
@cli_errors
def seed_demo_command(data_dir: Path, base_url: str) -> None:
    """Install demo feeds, media clips, device profiles, and a demo user."""
    result = seed_demo(data_dir, base_url)
    click.echo(f"seeded {result['data_dir']}")
    click.echo(f"feed: {result['feed_url']}")
    click.echo(f"profiles: {', '.join(result['profiles'])}")
    click.echo(f"demo user: {result['user']} (password demo1234)")


if __name__ == "__main__":
    main()
