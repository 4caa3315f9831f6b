"""Turn raw model responses into canonical templates.

Responses arrive with explanation text, assorted placeholder syntax, and the
occasional refusal. Extraction finds the delimited template span, rewrites
``{placeholder}`` spans to the canonical ``<*>`` wildcard, and classifies
anything that declines to answer.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Optional

from .errors import EmptyTemplate
from .templates import Template, WILDCARD

# Sentinel assigned to refused messages; never equals a real template, so a
# refusal scores as wrong in every metric.
REFUSED = "<REFUSED>"

_PLACEHOLDER = re.compile(r"\{[^{}]*\}")

# `content` between two backtick runs (covers `x` and ```x``` fences).
_PAIR_SPAN = re.compile(r"`+([^`]+?)`+")
# TeX-style `content' where the closing quote sits at a boundary, so
# apostrophes inside the template (e.g. "Can't") do not end the span.
_TEX_SPAN = re.compile(r"`([^`\n]*?)'(?=[\s.,;:!?)\]\"]|$)")
# Whole response is a single wrapped span (the mock-echo shape); greedy, so
# inner quotes and backticks survive.
_EXACT_WRAP = re.compile(r"\A`(.*)'\Z", re.DOTALL)

_LEAD_PHRASE = re.compile(r"\bthe template\b", re.IGNORECASE)
_IS_WORD = re.compile(r"\bis\b", re.IGNORECASE)

_REFUSAL_PHRASES = (
    "need more information",
    "more information is needed",
    "cannot determine",
    "can't determine",
    "unable to determine",
    "cannot extract",
    "can't extract",
    "could you provide",
    "could you please",
    "please provide",
    "more context",
    "i'm sorry",
    "i am sorry",
    "not a log message",
    "does not appear to be a log",
)


class ExtractionStatus(enum.Enum):
    EXTRACTED = "extracted"
    NO_DELIMITER = "no_delimiter"
    REFUSAL = "refusal"


@dataclass(frozen=True)
class ExtractionOutcome:
    status: ExtractionStatus
    template: Optional[Template]
    note: str = ""

    @property
    def template_text(self) -> str:
        """Canonical template text, or the refusal sentinel."""
        return self.template.raw if self.template is not None else REFUSED


def canonicalize(raw: str) -> Template:
    """Rewrite placeholder syntax to ``<*>`` and normalize whitespace.

    Every ``{...}`` span (innermost first, iterated to a fixed point) becomes
    the wildcard; existing ``<*>`` occurrences are already canonical.
    Consecutive wildcards are kept distinct. Raises EmptyTemplate when
    nothing remains after trimming.
    """
    text = raw
    while True:
        replaced = _PLACEHOLDER.sub(WILDCARD, text)
        if replaced == text:
            break
        text = replaced
    template = Template.from_text(text)
    if not template.tokens:
        raise EmptyTemplate(f"no tokens left after canonicalizing {raw!r}")
    return template


def _spans(text: str, start: int = 0) -> list[str]:
    """Delimited span contents found at or after offset, in order.

    When both delimiter styles open at the same backtick, the shorter span
    wins; the longer one has usually swallowed trailing prose.
    """
    found: list[tuple[int, int, str]] = []
    for pattern in (_PAIR_SPAN, _TEX_SPAN):
        for m in pattern.finditer(text, start):
            found.append((m.start(), len(m.group(1)), m.group(1)))
    found.sort(key=lambda item: (item[0], item[1]))
    return [content for _, _, content in found]


def _candidate_spans(response: str) -> list[str]:
    exact = _EXACT_WRAP.match(response.strip())
    if exact:
        return [exact.group(1)]
    lead = _LEAD_PHRASE.search(response)
    if lead:
        # "The template ... is `X'": the span after the "is" wins over any
        # demonstration log quoted earlier in the sentence.
        for is_word in _IS_WORD.finditer(response, lead.end()):
            after = _spans(response, is_word.end())
            if after:
                return after
    return _spans(response)


def _looks_like_refusal(response: str) -> bool:
    lowered = response.lower()
    return any(phrase in lowered for phrase in _REFUSAL_PHRASES)


def extract_delimited(response: str) -> ExtractionOutcome:
    """Pull the first usable template span out of a model response.

    Falls back to the last non-empty line when no delimiter is present, and
    classifies delimiter-free refusals ("cannot determine", requests for
    more context) as REFUSAL with no template.
    """
    for span in _candidate_spans(response):
        try:
            template = canonicalize(span)
        except EmptyTemplate:
            continue
        return ExtractionOutcome(ExtractionStatus.EXTRACTED, template, "delimited span")

    if _looks_like_refusal(response):
        return ExtractionOutcome(ExtractionStatus.REFUSAL, None, "refusal heuristics matched")

    lines = [line for line in response.splitlines() if line.strip()]
    if not lines:
        return ExtractionOutcome(ExtractionStatus.REFUSAL, None, "empty response")
    try:
        template = canonicalize(lines[-1])
    except EmptyTemplate:
        return ExtractionOutcome(ExtractionStatus.REFUSAL, None, "no canonicalizable text")
    return ExtractionOutcome(
        ExtractionStatus.NO_DELIMITER, template, "no delimiter; used last non-empty line"
    )
