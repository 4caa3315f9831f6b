"""Shared fixtures: CSV builders, synthetic benchmark datasets, data discovery."""

from __future__ import annotations

import csv
import os
import random
from pathlib import Path

import pytest

DATASET_FILE_SUFFIX = "_2k.log_structured_corrected.csv"

# Synthetic log vocabulary: each template with pools for its <*> slots.
# Values are single whitespace-free tokens so the ground-truth templates
# are exact under whitespace tokenization.
SYNTH_TEMPLATES = [
    ("Accepted password for <*> from <*> port <*> ssh2",
     [["root", "alice", "bob", "deploy"],
      ["10.0.0.1", "192.168.7.13", "172.16.4.2"],
      ["22", "2222", "50122", "41913"]]),
    ("Connection closed by <*>",
     [["10.0.0.9", "192.168.1.77", "172.16.0.8"]]),
    ("session opened for user <*> by (uid=<*>)",
     [["cyrus", "news", "root"], ["0", "501", "99"]]),
    ("Failed to allocate <*> MB on node <*>",
     [["128", "256", "2048"], ["node-03", "node-17", "node-99"]]),
    ("Block blk_<*> replicated to <*>",
     [["100142", "998877", "5550001"], ["10.1.0.4:50010", "10.1.0.7:50010"]]),
    ("Worker <*> heartbeat ok",
     [["w-1", "w-2", "w-3", "w-44"]]),
    ("Disk usage at <*> percent on <*>",
     [["81", "92", "97"], ["/dev/sda1", "/dev/sdb2"]]),
    ("Request <*> completed in <*> ms",
     [["req-0001", "req-0420", "req-9999"], ["3", "17", "250"]]),
]


def write_csv(path: Path, header: list[str], rows: list[list]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)
    return path


def write_synthetic_dataset(directory: Path, name: str, n: int = 2000, seed: int = 17) -> Path:
    """Write an n-row labelled dataset in the benchmark's file format."""
    rng = random.Random(seed)
    rows = []
    for line_id in range(1, n + 1):
        template, pools = SYNTH_TEMPLATES[rng.randrange(len(SYNTH_TEMPLATES))]
        content = template
        for pool in pools:
            content = content.replace("<*>", rng.choice(pool), 1)
        rows.append([line_id, content, template])
    return write_csv(
        directory / f"{name}{DATASET_FILE_SUFFIX}",
        ["LineId", "Content", "EventTemplate"],
        rows,
    )


@pytest.fixture
def synth_data_dir(tmp_path) -> Path:
    """Directory holding two small synthetic benchmark datasets."""
    data = tmp_path / "data"
    write_synthetic_dataset(data, "SynthA", n=120, seed=7)
    write_synthetic_dataset(data, "SynthB", n=80, seed=23)
    return data


def real_data_dir() -> Path | None:
    """Directory with real benchmark files, when one is available."""
    candidates = []
    env = os.environ.get("LOGBENCH_DATA_DIR")
    if env:
        candidates.append(Path(env))
    candidates.append(Path(__file__).parent / "data")
    for candidate in candidates:
        if candidate.is_dir():
            hits = list(candidate.glob(f"*{DATASET_FILE_SUFFIX}")) or list(
                candidate.glob(f"*/*{DATASET_FILE_SUFFIX}")
            )
            if hits:
                return candidate
    return None


def real_dataset_path(name: str) -> Path | None:
    directory = real_data_dir()
    if directory is None:
        return None
    for candidate in (
        directory / f"{name}{DATASET_FILE_SUFFIX}",
        directory / name / f"{name}{DATASET_FILE_SUFFIX}",
    ):
        if candidate.exists():
            return candidate
    return None


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    if report.passed:
        outcome = "PASS"
    elif report.skipped:
        outcome = "SKIP"
    else:
        outcome = "FAIL"
    print(f"[ACCEPTANCE] {outcome} {report.nodeid.split('::')[-1]}", flush=True)
