"""Prompt -> completion -> extraction pipeline, plus its estimator facade."""

from __future__ import annotations

from typing import Optional, Sequence

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .base import check_messages
from .datasets import Dataset
from .extraction import ExtractionOutcome, canonicalize, extract_delimited
from .llm import Backend, BackendConfig, ResponseCache, cached_complete, make_backend
from .prompts import Demonstration, PromptVariant, render_prompt, select_demonstrations
from .templates import LogRecord


def extract_template(
    content: str,
    variant: PromptVariant,
    demos: Sequence[Demonstration],
    backend: Backend,
    cache: Optional[ResponseCache] = None,
    record: Optional[LogRecord] = None,
) -> ExtractionOutcome:
    """Run one log message through prompt rendering, completion, extraction."""
    prompt = render_prompt(variant, tuple(demos), content)
    response = cached_complete(prompt, backend, cache, record=record)
    return extract_delimited(response.text)


class LLMTemplateParser(BaseEstimator):
    """Language-model log parser with a scikit-learn transformer surface.

    ``fit(X, y)`` takes log messages and their ground-truth templates and,
    for shots > 0, selects the demonstrations embedded in every prompt.
    ``transform(X)`` returns one canonical template string per message
    (the ``<REFUSED>`` sentinel for refusals).

    The echo backend answers from the fitted (X, y) pairs by content lookup,
    which assumes no two fitted messages share content with different
    templates; the benchmark runner resolves such ties record-by-record.
    """

    def __init__(
        self,
        variant: str = "PT1",
        shots: int = 0,
        seed: int = 0,
        backend_config: Optional[BackendConfig] = None,
        cache_path: str = "",
    ):
        self.variant = variant
        self.shots = shots
        self.seed = seed
        self.backend_config = backend_config
        self.cache_path = cache_path

    def fit(self, X: Sequence[str], y: Sequence[str]) -> "LLMTemplateParser":
        messages = check_messages(X)
        truths = list(y)
        if len(messages) != len(truths):
            raise ValueError(f"X and y differ in length: {len(messages)} vs {len(truths)}")
        variant = PromptVariant(self.variant)
        if (self.shots > 0) != (variant is PromptVariant.PT2):
            raise ValueError("shots > 0 requires variant PT2, and PT2 requires shots > 0")

        records = tuple(
            LogRecord(line_id=i, content=content, truth_template=canonicalize(truth))
            for i, (content, truth) in enumerate(zip(messages, truths), start=1)
        )
        groups: dict[str, set[int]] = {}
        for rec in records:
            groups.setdefault(rec.truth_template.raw, set()).add(rec.line_id)
        dataset = Dataset(
            name="<fit>",
            records=records,
            template_index={t: frozenset(ids) for t, ids in groups.items()},
        )
        self.demonstrations_ = tuple(select_demonstrations(dataset, self.shots, self.seed))
        config = self.backend_config or BackendConfig()
        self._backend = make_backend(config, dataset=dataset)
        self._cache = ResponseCache(self.cache_path) if self.cache_path else None
        return self

    def transform(self, X: Sequence[str]) -> list[str]:
        check_is_fitted(self, "demonstrations_")
        variant = PromptVariant(self.variant)
        return [
            extract_template(
                content, variant, self.demonstrations_, self._backend, self._cache
            ).template_text
            for content in check_messages(X)
        ]

    def fit_transform(self, X: Sequence[str], y: Sequence[str]) -> list[str]:
        return self.fit(X, y).transform(X)
