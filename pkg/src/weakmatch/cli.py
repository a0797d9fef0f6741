"""Command-line interface mirroring every service endpoint."""

from __future__ import annotations

import json
import sys

import click

from .labelmodel import AllAbstainError, NoPredictedMatchesError
from .lf import SpecFormatError
from .project import LFValidationError, Project, ProjectError


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _load(project_dir: str) -> Project:
    try:
        return Project.load(project_dir)
    except ProjectError as e:
        _fail(str(e))


def _echo_json(payload) -> None:
    click.echo(json.dumps(payload, indent=2))


@click.group()
def main():
    """Weakly supervised entity-matching workbench."""


@main.command()
@click.option("--project", "project_dir", required=True, type=click.Path())
@click.option("--left", required=True, type=click.Path(exists=True))
@click.option("--right", required=True, type=click.Path(exists=True))
@click.option("--id-column", default="id", show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True),
              help="JSON file with config overrides.")
@click.option("--ground-truth", "ground_truth_path", type=click.Path(exists=True),
              help="CSV of left_id,right_id,value fixture labels.")
def init(project_dir, left, right, id_column, config_path, ground_truth_path):
    """Create a project: ingest, block, auto-generate LFs, fit once."""
    config = None
    if config_path:
        with open(config_path, encoding="utf-8") as f:
            config = json.load(f)
    try:
        project = Project.create(project_dir, left, right, id_column,
                                 config=config, ground_truth_path=ground_truth_path)
    except (ProjectError, ValueError) as e:
        _fail(str(e))
    _echo_json(project.stats())


@main.command()
@click.option("--project", "project_dir", required=True, type=click.Path(exists=True))
def stats(project_dir):
    """Show task statistics."""
    _echo_json(_load(project_dir).stats())


@main.group()
def lf():
    """Manage labeling functions."""


@lf.command("add")
@click.argument("spec_file", type=click.Path(exists=True))
@click.option("--project", "project_dir", required=True, type=click.Path(exists=True))
def lf_add(spec_file, project_dir):
    """Add or update an LF from a spec file."""
    project = _load(project_dir)
    with open(spec_file, encoding="utf-8") as f:
        text = f.read()
    try:
        result = project.upsert_lf(text)
    except LFValidationError as e:
        click.echo("invalid LF spec:", err=True)
        for d in e.diagnostics:
            click.echo(f"  - {d}", err=True)
        sys.exit(1)
    except SpecFormatError as e:
        _fail(str(e))
    _echo_json(result)


@lf.command("rm")
@click.argument("name")
@click.option("--project", "project_dir", required=True, type=click.Path(exists=True))
def lf_rm(name, project_dir):
    """Delete an LF by name."""
    project = _load(project_dir)
    try:
        project.delete_lf(name)
    except ProjectError as e:
        _fail(str(e))
    click.echo(f"deleted {name}")


@lf.command("ls")
@click.option("--project", "project_dir", required=True, type=click.Path(exists=True))
@click.option("--full", is_flag=True, help="Print full spec text.")
def lf_ls(project_dir, full):
    """List LFs."""
    project = _load(project_dir)
    entries = project.list_lfs()
    if full:
        _echo_json(entries)
        return
    for e in entries:
        click.echo(f"{e['name']}\t{e['origin']}\t{e['version'][:12]}")


@main.command()
@click.option("--project", "project_dir", required=True, type=click.Path(exists=True))
def apply(project_dir):
    """Apply LFs incrementally and refit the labeling model."""
    project = _load(project_dir)
    try:
        result = project.apply_and_fit()
    except (ProjectError, AllAbstainError) as e:
        _fail(str(e))
    _echo_json(result)


@main.command()
@click.option("--project", "project_dir", required=True, type=click.Path(exists=True))
@click.option("--kind", type=click.Choice(["smart", "precision"]), default="smart",
              show_default=True)
@click.option("-n", "sample_size", default=10, show_default=True)
def sample(project_dir, kind, sample_size):
    """Show a smart sample of likely missed matches, or a precision sample."""
    project = _load(project_dir)
    try:
        rows = project.get_sample(kind, sample_size)
    except (ProjectError, NoPredictedMatchesError) as e:
        _fail(str(e))
    _echo_json(rows)


@main.command()
@click.argument("left_id")
@click.argument("right_id")
@click.argument("value", type=click.Choice(["match", "non-match", "clear"]))
@click.option("--project", "project_dir", required=True, type=click.Path(exists=True))
def label(left_id, right_id, value, project_dir):
    """Record a ground-truth label for a candidate pair."""
    project = _load(project_dir)
    try:
        _echo_json(project.label_pair(left_id, right_id, value))
    except ProjectError as e:
        _fail(str(e))


@main.command()
@click.argument("lf_name")
@click.option("--kind", type=click.Choice(["fp", "fn"]), default="fp", show_default=True)
@click.option("--project", "project_dir", required=True, type=click.Path(exists=True))
def drill(lf_name, kind, project_dir):
    """Show pairs where an LF and the model disagree."""
    project = _load(project_dir)
    try:
        _echo_json(project.drilldown(lf_name, kind))
    except ProjectError as e:
        _fail(str(e))


@main.command()
@click.option("--project", "project_dir", required=True, type=click.Path(exists=True))
@click.option("-o", "out_path", type=click.Path(), help="Write to file instead of stdout.")
def export(project_dir, out_path):
    """Export predicted matches as CSV."""
    project = _load(project_dir)
    try:
        text = project.export_matches()
    except ProjectError as e:
        _fail(str(e))
    if out_path:
        with open(out_path, "w", encoding="utf-8") as f:
            f.write(text)
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--root", "root_dir", required=True, type=click.Path(),
              help="Directory that holds (or will hold) projects.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(root_dir, host, port):
    """Run the HTTP API."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(root_dir), host=host, port=port, log_level="warning")


@main.command()
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--n-left", default=200, show_default=True)
@click.option("--n-right", default=200, show_default=True)
@click.option("--seed", default=7, show_default=True)
def fixture(out_dir, n_left, n_right, seed):
    """Write the bundled product-catalog demo dataset as CSV files."""
    from .datasets import make_product_tables, write_fixture_csvs

    tables, truth = make_product_tables(n_left=n_left, n_right=n_right, seed=seed)
    paths = write_fixture_csvs(out_dir, tables, truth)
    _echo_json(paths)


if __name__ == "__main__":
    main()
