"""Experiment orchestration: run parsers over datasets, persist artifacts.

A run loads each dataset, produces exactly one prediction per record (via
the LLM pipeline or the Drain baseline), writes a predictions file and a
metrics report per dataset, and finishes with a manifest that suffices to
replay the run deterministically from the response cache. A dataset that
fails is recorded in the manifest and skipped; the run continues.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

from .datasets import Dataset, load_dataset
from .drain import DrainParser, drain_params_for, load_drain_config
from .errors import EmptyInput, LogbenchError
from .extraction import REFUSED, canonicalize
from .llm import Backend, BackendConfig, ResponseCache, make_backend
from .llm_parser import extract_template
from .metrics import MetricsReport, Prediction, evaluate
from .prompts import PromptVariant, select_demonstrations

DATASET_FILE_SUFFIX = "_2k.log_structured_corrected.csv"
VALID_SHOTS = (0, 1, 2, 4)


@dataclass(frozen=True)
class ExperimentConfig:
    dataset_names: tuple[str, ...]
    data_dir: str
    output_dir: str
    method: str = "llm"  # "llm" | "drain"
    variant: str = "PT1"
    shots: int = 0
    seed: int = 0
    backend: BackendConfig = field(default_factory=BackendConfig)
    cache_path: str = ""
    drain_config_path: str = ""

    def __post_init__(self):
        if self.method not in ("llm", "drain"):
            raise ValueError(f"method must be 'llm' or 'drain', got {self.method!r}")
        if not self.dataset_names:
            raise ValueError("no datasets selected")
        if self.method == "llm":
            if self.shots not in VALID_SHOTS:
                raise ValueError(f"shots must be one of {VALID_SHOTS}, got {self.shots}")
            variant = PromptVariant(self.variant)
            if (self.shots > 0) != (variant is PromptVariant.PT2):
                raise ValueError(
                    "few-shot runs use PT2 and PT2 needs shots in (1, 2, 4); "
                    f"got variant={self.variant} shots={self.shots}"
                )


@dataclass
class RunOutcome:
    reports: list[MetricsReport]
    failures: dict[str, str]
    manifest_path: Path
    backend_calls: int = 0


def resolve_dataset_path(data_dir: str | Path, name: str) -> Path:
    """Locate a dataset file under the benchmark's flat or nested layout."""
    data_dir = Path(data_dir)
    candidates = (
        data_dir / f"{name}{DATASET_FILE_SUFFIX}",
        data_dir / name / f"{name}{DATASET_FILE_SUFFIX}",
        data_dir / f"{name}.csv",
    )
    for candidate in candidates:
        if candidate.exists():
            return candidate
    raise FileNotFoundError(f"no dataset file for {name!r} under {data_dir}")


def discover_datasets(data_dir: str | Path) -> list[str]:
    """Names of all benchmark files present under a directory."""
    data_dir = Path(data_dir)
    names = {
        path.name[: -len(DATASET_FILE_SUFFIX)]
        for path in data_dir.glob(f"*{DATASET_FILE_SUFFIX}")
    }
    names.update(
        path.name[: -len(DATASET_FILE_SUFFIX)]
        for path in data_dir.glob(f"*/*{DATASET_FILE_SUFFIX}")
    )
    return sorted(names)


class _DatasetFailure(LogbenchError):
    """Internal: aborts one dataset, tagged with dataset and line context."""


def _parse_with_llm(
    dataset: Dataset,
    config: ExperimentConfig,
    backend: Backend,
    cache: Optional[ResponseCache],
) -> tuple[list[Prediction], list[str]]:
    variant = PromptVariant(config.variant)
    demos = select_demonstrations(dataset, config.shots, config.seed) if config.shots else []
    predictions: list[Prediction] = []
    statuses: list[str] = []
    for record in dataset.records:
        try:
            outcome = extract_template(
                record.content, variant, demos, backend, cache, record=record
            )
        except LogbenchError as exc:
            raise _DatasetFailure(
                f"{dataset.name}: line {record.line_id}: {type(exc).__name__}: {exc}"
            ) from exc
        predictions.append(Prediction(record.line_id, outcome.template_text))
        statuses.append(outcome.status.value)
    return predictions, statuses


def _parse_with_drain(
    dataset: Dataset, config: ExperimentConfig
) -> tuple[list[Prediction], list[str]]:
    overrides = load_drain_config(config.drain_config_path) if config.drain_config_path else None
    params = drain_params_for(dataset.name, overrides)
    templates = DrainParser(**params).fit_transform(
        [record.content for record in dataset.records]
    )
    predictions = [
        Prediction(record.line_id, canonicalize(text).raw)
        for record, text in zip(dataset.records, templates)
    ]
    return predictions, ["drain"] * len(predictions)


def write_predictions(path: Path, dataset: Dataset, predictions: Sequence[Prediction],
                      statuses: Sequence[str]) -> None:
    by_line = {pred.line_id: pred for pred in predictions}
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["line_id", "content", "truth_template", "predicted_template", "status"])
        for record, status in zip(dataset.records, statuses):
            pred = by_line[record.line_id]
            writer.writerow(
                [record.line_id, record.content, record.truth_template.raw, pred.template, status]
            )


def read_predictions(path: str | Path) -> list[Prediction]:
    """Load predictions back from a predictions CSV (for re-scoring)."""
    with Path(path).open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or not {"line_id", "predicted_template"} <= set(reader.fieldnames):
            raise LogbenchError(
                f"{path}: predictions file needs 'line_id' and 'predicted_template' columns"
            )
        out = []
        for row in reader:
            text = row["predicted_template"]
            if text != REFUSED:
                text = canonicalize(text).raw
            out.append(Prediction(int(row["line_id"]), text))
    return out


def _report_payload(report: MetricsReport) -> dict:
    return {
        "dataset": report.dataset,
        "n": report.n,
        "ga": report.ga,
        "mla": report.mla,
        "ed": report.ed,
    }


def write_metrics(path: Path, report: MetricsReport) -> None:
    path.write_text(json.dumps(_report_payload(report), indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def read_metrics(path: str | Path) -> MetricsReport:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return MetricsReport(dataset=data["dataset"], n=data["n"], ga=data["ga"],
                         mla=data["mla"], ed=data["ed"])


def run_experiment(config: ExperimentConfig) -> RunOutcome:
    """Execute a full run; every record of every dataset gets one prediction."""
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = datetime.now(timezone.utc).isoformat()

    cache = ResponseCache(config.cache_path) if config.cache_path else None
    # Remote and fixture backends are dataset-independent; construct them up
    # front so credential/fixture problems fail the whole run immediately.
    shared_backend: Optional[Backend] = None
    if config.method == "llm" and config.backend.kind != "mock_echo":
        shared_backend = make_backend(config.backend)

    reports: list[MetricsReport] = []
    failures: dict[str, str] = {}
    dataset_entries: dict[str, dict] = {}
    backend_calls = 0

    for name in config.dataset_names:
        backend: Optional[Backend] = shared_backend
        try:
            dataset = load_dataset(resolve_dataset_path(config.data_dir, name), name)
            if config.method == "llm":
                if backend is None:
                    backend = make_backend(config.backend, dataset=dataset)
                predictions, statuses = _parse_with_llm(dataset, config, backend, cache)
            else:
                predictions, statuses = _parse_with_drain(dataset, config)
            predictions_path = out_dir / f"{name}_predictions.csv"
            metrics_path = out_dir / f"{name}_metrics.json"
            write_predictions(predictions_path, dataset, predictions, statuses)
            report = evaluate(dataset, predictions)
            write_metrics(metrics_path, report)
            reports.append(report)
            dataset_entries[name] = {
                "status": "ok",
                "n": report.n,
                "predictions": predictions_path.name,
                "metrics": metrics_path.name,
            }
        except (LogbenchError, OSError, ValueError) as exc:
            failures[name] = f"{type(exc).__name__}: {exc}"
            dataset_entries[name] = {"status": "failed", "error": failures[name]}
        if backend is not None and backend is not shared_backend:
            backend_calls += backend.calls_made
    if shared_backend is not None:
        backend_calls += shared_backend.calls_made

    manifest = {
        "config": {
            "dataset_names": list(config.dataset_names),
            "data_dir": str(config.data_dir),
            "output_dir": str(config.output_dir),
            "method": config.method,
            "variant": config.variant,
            "shots": config.shots,
            "seed": config.seed,
            "backend": asdict(config.backend),
            "cache_path": str(config.cache_path),
            "drain_config_path": str(config.drain_config_path),
        },
        "model_id": config.backend.model_id,
        "started_at": started,
        "finished_at": datetime.now(timezone.utc).isoformat(),
        "request_ordering": "datasets sequential, records in file order",
        "backend_calls": backend_calls,
        "cache": {
            "path": str(config.cache_path),
            "hits": cache.stats.hits if cache else 0,
            "misses": cache.stats.misses if cache else 0,
        },
        "datasets": dataset_entries,
    }
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                             encoding="utf-8")
    return RunOutcome(reports=reports, failures=failures, manifest_path=manifest_path,
                      backend_calls=backend_calls)


def replay_run(manifest_path: str | Path, output_dir: str | Path) -> RunOutcome:
    """Re-execute a finished run from its manifest (cache supplies responses)."""
    manifest = json.loads(Path(manifest_path).read_text(encoding="utf-8"))
    saved = manifest["config"]
    config = ExperimentConfig(
        dataset_names=tuple(saved["dataset_names"]),
        data_dir=saved["data_dir"],
        output_dir=str(output_dir),
        method=saved["method"],
        variant=saved["variant"],
        shots=saved["shots"],
        seed=saved["seed"],
        backend=BackendConfig(**saved["backend"]),
        cache_path=saved["cache_path"],
        drain_config_path=saved["drain_config_path"],
    )
    return run_experiment(config)


def render_report(
    reports: Sequence[MetricsReport],
    fmt: str = "table",
    missing: Sequence[str] = (),
) -> str:
    """Render per-dataset metrics plus an unweighted Average row.

    Datasets that failed render as marked-missing rows and are excluded
    from the averages. ED is lower-is-better.
    """
    if fmt not in ("table", "csv"):
        raise ValueError(f"format must be 'table' or 'csv', got {fmt!r}")
    if not reports and not missing:
        raise EmptyInput("no reports to render")

    rows = [(r.dataset, str(r.n), f"{r.ga:.3f}", f"{r.mla:.3f}", f"{r.ed:.3f}") for r in reports]
    rows += [(name, "---", "---", "---", "---") for name in missing]
    if reports:
        total_n = sum(r.n for r in reports)
        avg = (
            "Average",
            str(total_n),
            f"{sum(r.ga for r in reports) / len(reports):.3f}",
            f"{sum(r.mla for r in reports) / len(reports):.3f}",
            f"{sum(r.ed for r in reports) / len(reports):.3f}",
        )
        rows.append(avg)

    header = ("dataset", "n", "ga", "mla", "ed")
    if fmt == "csv":
        return "\n".join([",".join(header)] + [",".join(row) for row in rows])

    widths = [
        max(len(header[col]), *(len(row[col]) for row in rows)) for col in range(len(header))
    ]
    def _line(values):
        first = values[0].ljust(widths[0])
        rest = [values[col].rjust(widths[col]) for col in range(1, len(values))]
        return "  ".join([first] + rest)

    lines = [_line(header)]
    lines.extend(_line(row) for row in rows)
    lines.append("")
    lines.append("ED: lower is better.")
    return "\n".join(lines)
