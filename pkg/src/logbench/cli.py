"""Command-line interface: run experiments, score prediction files, render reports.

Exit codes: 0 full success, 1 configuration error, 2 partial dataset failures.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .datasets import load_dataset
from .errors import LogbenchError
from .llm import BackendConfig
from .metrics import evaluate
from .runner import (
    ExperimentConfig,
    discover_datasets,
    read_metrics,
    read_predictions,
    render_report,
    run_experiment,
)

_BACKEND_KIND = {"remote": "remote", "mock-echo": "mock_echo", "mock-fixture": "mock_fixture"}


@click.group()
def main():
    """Log template extraction benchmark harness."""


@main.command()
@click.option("--datasets", required=True,
              help="Comma-separated dataset names, or 'all' to scan the data dir.")
@click.option("--data-dir", required=True, type=click.Path())
@click.option("--method", type=click.Choice(["llm", "drain"]), default="llm", show_default=True)
@click.option("--prompt", type=click.Choice(["pt1", "pt2", "pt3", "pt4"]), default="pt1",
              show_default=True, help="Prompt variant (LLM method only).")
@click.option("--shots", type=click.Choice(["0", "1", "2", "4"]), default="0",
              show_default=True, help="Demonstration count; any value > 0 forces PT2.")
@click.option("--backend", type=click.Choice(sorted(_BACKEND_KIND)), default="mock-echo",
              show_default=True)
@click.option("--model", default="gpt-3.5-turbo-0301", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--cache", type=click.Path(), default="", help="Response cache file (JSONL).")
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--endpoint-url", default="", help="Chat-completion endpoint (remote backend).")
@click.option("--fixture", type=click.Path(), default="",
              help="Canned responses file (mock-fixture backend).")
@click.option("--temperature", type=float, default=0.0, show_default=True)
@click.option("--max-retries", type=int, default=3, show_default=True)
@click.option("--rpm", type=int, default=60, show_default=True,
              help="Request rate cap per 60-second window (remote backend).")
@click.option("--timeout", type=float, default=30.0, show_default=True)
@click.option("--drain-config", type=click.Path(), default="",
              help="Per-dataset Drain parameter overrides.")
def run(datasets, data_dir, method, prompt, shots, backend, model, seed, cache, out,
        endpoint_url, fixture, temperature, max_retries, rpm, timeout, drain_config):
    """Run a parsing experiment over one or more datasets."""
    try:
        if not Path(data_dir).is_dir():
            raise LogbenchError(f"data dir does not exist: {data_dir}")
        if drain_config and not Path(drain_config).is_file():
            raise LogbenchError(f"drain config does not exist: {drain_config}")
        shots = int(shots)
        variant = "PT2" if shots > 0 else prompt.upper()
        if datasets.strip().lower() == "all":
            names = tuple(discover_datasets(data_dir))
            if not names:
                raise LogbenchError(f"no benchmark files found under {data_dir}")
        else:
            names = tuple(n.strip() for n in datasets.split(",") if n.strip())
        config = ExperimentConfig(
            dataset_names=names,
            data_dir=data_dir,
            output_dir=out,
            method=method,
            variant=variant,
            shots=shots,
            seed=seed,
            backend=BackendConfig(
                kind=_BACKEND_KIND[backend],
                model_id=model,
                endpoint_url=endpoint_url,
                temperature=temperature,
                max_retries=max_retries,
                requests_per_minute=rpm,
                timeout_seconds=timeout,
                fixture_path=fixture,
            ),
            cache_path=cache,
            drain_config_path=drain_config,
        )
        outcome = run_experiment(config)
    except (LogbenchError, ValueError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)

    if outcome.reports:
        click.echo(render_report(outcome.reports, "table", missing=sorted(outcome.failures)))
    for name, reason in outcome.failures.items():
        click.echo(f"failed: {name}: {reason}", err=True)
    click.echo(f"manifest: {outcome.manifest_path}")
    if outcome.failures:
        sys.exit(2)


@main.command("eval")
@click.option("--pred", required=True, type=click.Path(),
              help="Predictions CSV (line_id, predicted_template, ...).")
@click.option("--truth", required=True, type=click.Path(),
              help="Ground-truth structured CSV.")
@click.option("--name", default="", help="Dataset name for the report row.")
@click.option("--format", "fmt", type=click.Choice(["table", "csv"]), default="table",
              show_default=True)
def eval_cmd(pred, truth, name, fmt):
    """Score an existing predictions file against a ground-truth file."""
    try:
        for path in (pred, truth):
            if not Path(path).is_file():
                raise LogbenchError(f"file does not exist: {path}")
        dataset_name = name or Path(truth).stem.split("_")[0]
        dataset = load_dataset(truth, dataset_name)
        predictions = read_predictions(pred)
        report = evaluate(dataset, predictions)
    except (LogbenchError, ValueError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(render_report([report], fmt))


@main.command()
@click.option("--in", "in_dir", required=True, type=click.Path(),
              help="Run output directory holding *_metrics.json and manifest.json.")
@click.option("--format", "fmt", type=click.Choice(["table", "csv"]), default="table",
              show_default=True)
def report(in_dir, fmt):
    """Render the comparison table for a finished run."""
    try:
        in_dir = Path(in_dir)
        if not in_dir.is_dir():
            raise LogbenchError(f"run directory does not exist: {in_dir}")
        manifest_path = in_dir / "manifest.json"
        missing: list[str] = []
        if manifest_path.exists():
            manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
            order = manifest["config"]["dataset_names"]
            entries = manifest["datasets"]
            reports = [
                read_metrics(in_dir / entries[name]["metrics"])
                for name in order
                if entries.get(name, {}).get("status") == "ok"
            ]
            missing = [n for n in order if entries.get(n, {}).get("status") != "ok"]
        else:
            reports = [read_metrics(path) for path in sorted(in_dir.glob("*_metrics.json"))]
        text = render_report(reports, fmt, missing=missing)
    except (LogbenchError, ValueError, OSError, KeyError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(text)


if __name__ == "__main__":
    main()
