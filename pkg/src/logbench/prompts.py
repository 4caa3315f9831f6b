"""Render the four prompt variants and pick few-shot demonstrations.

Prompt text is frozen byte-for-byte (golden-tested); the ``[LOG]`` slot takes
the target message verbatim, with no escaping of quotes or backticks. The
zero-shot variants are: the standard instruction (PT1), a minimal ask (PT3),
and an enhanced three-step instruction (PT4). PT2 adds worked (log, template)
examples ahead of the question.
"""

from __future__ import annotations

import enum
import random
from collections import Counter
from dataclasses import dataclass

from .datasets import Dataset
from .errors import ArityMismatch, EmptyLog, InsufficientTemplates
from .templates import Template


class PromptVariant(str, enum.Enum):
    PT1 = "PT1"
    PT2 = "PT2"
    PT3 = "PT3"
    PT4 = "PT4"

    @property
    def needs_demos(self) -> bool:
        return self is PromptVariant.PT2


@dataclass(frozen=True)
class Demonstration:
    """One worked example shown inside a few-shot prompt."""

    log: str
    template: Template

    def __post_init__(self):
        if not self.log.strip():
            raise ValueError("demonstration log must be non-empty")


@dataclass(frozen=True)
class PromptSpec:
    variant: PromptVariant
    demos: tuple[Demonstration, ...]
    target_log: str
    rendered: str


# Prompt texts are assembled by plain concatenation around the slots, so a
# log message containing anything slot-like still passes through verbatim.
_PT1_PREFIX = (
    "You will be provided with a log message delimited by backticks. "
    "You must abstract variables with `{placeholders}' to extract the "
    "corresponding template. "
    "Print the input log's template delimited by backticks.\n"
    "\n"
    "Log message: `"
)

_PT2_PREFIX = (
    "You will be provided with a log message delimited by backticks. "
    "You must abstract variables with `{placeholders}' to extract the "
    "corresponding template.\n"
    "\n"
    "For example:\n"
)
_PT2_MIDDLE = (
    "\n"
    "\n"
    "Print the input log's template delimited by backticks.\n"
    "\n"
    "Log message: `"
)

_PT3_PREFIX = (
    "You will be provided with a log message delimited by backticks. "
    "Please extract the log template from this log message:\n"
    "`"
)

_PT4_PREFIX = (
    "You will be provided with a log message delimited by backticks. "
    "You must identify and abstract all the dynamic variables in logs with "
    "`{placeholders}` and output a static log template. "
    "Print the input log's template delimited by backticks.\n"
    "\n"
    "Log message: `"
)

_ZERO_SHOT_PREFIX = {
    PromptVariant.PT1: _PT1_PREFIX,
    PromptVariant.PT3: _PT3_PREFIX,
    PromptVariant.PT4: _PT4_PREFIX,
}


def demo_line(demo: Demonstration) -> str:
    return f"The template of `{demo.log}' is `{demo.template.raw}'."


def render_prompt(
    variant: PromptVariant,
    demos: list[Demonstration] | tuple[Demonstration, ...],
    target_log: str,
) -> PromptSpec:
    """Produce the full prompt text for one target log message."""
    demos = tuple(demos)
    if variant.needs_demos and not demos:
        raise ArityMismatch(f"{variant.value} requires at least one demonstration")
    if not variant.needs_demos and demos:
        raise ArityMismatch(f"{variant.value} is zero-shot; got {len(demos)} demonstrations")
    if not target_log.strip():
        raise EmptyLog("target log message is empty")

    if variant.needs_demos:
        block = "\n".join(demo_line(d) for d in demos)
        rendered = f"{_PT2_PREFIX}{block}{_PT2_MIDDLE}{target_log}'"
    else:
        rendered = f"{_ZERO_SHOT_PREFIX[variant]}{target_log}'"
    return PromptSpec(variant=variant, demos=demos, target_log=target_log, rendered=rendered)


def select_demonstrations(dataset: Dataset, k: int, seed: int) -> list[Demonstration]:
    """Choose k demonstrations from a labelled dataset, deterministically.

    k=1 picks the most frequent message content (ties -> smallest line_id).
    k>=2 samples k distinct truth-template groups without replacement using
    the seeded generator and represents each by its earliest record.
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if k == 0:
        return []
    distinct = len(dataset.template_index)
    if k > distinct:
        raise InsufficientTemplates(
            f"requested {k} demonstrations but {dataset.name} has {distinct} distinct templates"
        )

    if k == 1:
        counts = Counter(rec.content for rec in dataset.records)
        top = max(counts.values())
        winner = min(rec.line_id for rec in dataset.records if counts[rec.content] == top)
        record = dataset.record_by_line(winner)
        return [Demonstration(log=record.content, template=record.truth_template)]

    groups = list(dataset.template_index.values())
    rng = random.Random(seed)
    rng.shuffle(groups)
    demos = []
    for ids in groups[:k]:
        record = dataset.record_by_line(min(ids))
        demos.append(Demonstration(log=record.content, template=record.truth_template))
    return demos
