"""Command-line interface: setup wizard, pipeline verbs, API server,
case-study replay and graph export."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .. import __version__
from ..errors import McpIntelError
from .casestudy import replay_case_study
from .config import PlatformConfig, load_config, save_config
from .runs import PipelineContext, RunKind, run_pipeline

DEFAULT_CONFIG_PATH = "mcpintel.yaml"


def _context(config_path: str) -> PipelineContext:
    config = load_config(config_path)
    return PipelineContext.from_config(config)


def _print_run(record) -> None:
    click.echo(f"run {record.run_id} [{record.kind.value}] -> {record.status.value}")
    for key, value in sorted(record.counts.items()):
        click.echo(f"  {key}: {value}")
    for error in record.errors:
        click.echo(f"  error: {error}", err=True)


@click.group()
@click.version_option(version=__version__, prog_name="mcpintel")
def main():
    """Threat intelligence platform for MCP agent ecosystems."""


@main.command()
@click.option("--path", default=DEFAULT_CONFIG_PATH, show_default=True, help="Where to write the config file.")
@click.option("--non-interactive", is_flag=True, help="Write defaults without prompting.")
def init(path, non_interactive):
    """Setup wizard: writes the platform config file.

    Credentials are never stored; set MCPINTEL_LLM_API_KEY in the
    environment for live model calls.
    """
    if Path(path).exists() and not click.confirm(f"{path} exists; overwrite?"):
        raise SystemExit(1)
    config = PlatformConfig()
    if not non_interactive:
        config.model_id = click.prompt("Model id", default=config.model_id)
        config.api_base = click.prompt("Completion API base URL", default="https://api.openai.com/v1")
        config.data_dir = Path(click.prompt("Data directory", default=str(config.data_dir)))
    save_config(config.validate(), path)
    click.echo(f"wrote {path}")


@main.command()
@click.option("--config", "config_path", default=DEFAULT_CONFIG_PATH, show_default=True)
def gather(config_path):
    """Collect intelligence from all configured sources."""
    _print_run(run_pipeline(RunKind.GATHER, _context(config_path)))


@main.command()
@click.option("--config", "config_path", default=DEFAULT_CONFIG_PATH, show_default=True)
def analyze(config_path):
    """Score, filter and classify collected items; update the graph."""
    _print_run(run_pipeline(RunKind.ANALYZE, _context(config_path)))


@main.command()
@click.option("--config", "config_path", default=DEFAULT_CONFIG_PATH, show_default=True)
@click.option("--card-id", "card_ids", multiple=True, help="Plan only these cards (repeatable).")
def plan(config_path, card_ids):
    """Generate a risk plan for stored threat cards."""
    _print_run(run_pipeline(RunKind.PLAN, _context(config_path), card_ids=list(card_ids) or None))


@main.command()
@click.option("--config", "config_path", default=DEFAULT_CONFIG_PATH, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8787, show_default=True)
def serve(config_path, host, port):
    """Serve the REST API (and with it, the dashboard backend)."""
    import uvicorn

    from .api import create_app

    app = create_app(_context(config_path), config_path=config_path)
    uvicorn.run(app, host=host, port=port)


@main.command("replay-case-study")
@click.option("--data-dir", default=None, help="Reuse a data directory instead of a fresh temp one.")
def replay_case_study_cmd(data_dir):
    """Replay the recorded GitHub MCP incident end-to-end, offline."""
    report = replay_case_study(data_dir)
    for check in report.checks:
        mark = "ok " if check.passed else "FAIL"
        click.echo(f"[{mark}] {check.name}: expected {check.expected!r}, got {check.actual!r}")
    if not report.passed:
        raise SystemExit(1)
    click.echo("case study reproduced")


@main.command("export-graph")
@click.option("--config", "config_path", default=DEFAULT_CONFIG_PATH, show_default=True)
@click.option("--nodes", "nodes_path", default="graph-nodes.csv", show_default=True)
@click.option("--edges", "edges_path", default="graph-edges.csv", show_default=True)
def export_graph(config_path, nodes_path, edges_path):
    """Write the knowledge graph as property-graph bulk CSV files."""
    ctx = _context(config_path)
    ctx.graph.export(nodes_path, edges_path)
    click.echo(f"exported {len(ctx.graph.nodes)} nodes to {nodes_path}, {len(ctx.graph.edges)} edges to {edges_path}")


def run_main() -> None:
    try:
        main(standalone_mode=True)
    except McpIntelError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    run_main()
