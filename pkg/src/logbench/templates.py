"""Core data model: whitespace tokens, templates, and labelled log records.

A template is a whitespace-tokenized string in which every dynamic position
is the wildcard token ``<*>``. All metric math and all other modules share
this one representation; placeholder syntax used on the prompt side is
rewritten to it by :mod:`logbench.extraction`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

WILDCARD = "<*>"


class TokenKind(enum.Enum):
    LITERAL = "literal"
    WILDCARD = "wildcard"


@dataclass(frozen=True)
class Token:
    """One whitespace-delimited piece of a template."""

    kind: TokenKind
    text: str

    def __post_init__(self):
        if self.kind is TokenKind.WILDCARD:
            if self.text != WILDCARD:
                raise ValueError(f"wildcard token must be {WILDCARD!r}, got {self.text!r}")
        else:
            if self.text == WILDCARD:
                raise ValueError(f"literal token may not equal {WILDCARD!r}")
            if not self.text or any(c.isspace() for c in self.text):
                raise ValueError(f"literal token may not be empty or contain whitespace: {self.text!r}")

    @classmethod
    def literal(cls, text: str) -> "Token":
        return cls(TokenKind.LITERAL, text)

    @classmethod
    def wildcard(cls) -> "Token":
        return cls(TokenKind.WILDCARD, WILDCARD)


def is_wildcard(tok: Token) -> bool:
    """True iff the token marks a dynamic (variable) position."""
    return tok.kind is TokenKind.WILDCARD


def tokenize(text: str) -> tuple[Token, ...]:
    """Split on whitespace runs; pieces equal to ``<*>`` become wildcards.

    Empty input yields the empty tuple. Punctuation stays attached to its
    token, so forms like ``<*>:<*>`` are a single (literal) token.
    """
    return tuple(
        Token.wildcard() if piece == WILDCARD else Token.literal(piece)
        for piece in text.split()
    )


@dataclass(frozen=True)
class Template:
    """Canonical template: single-space joined tokens, wildcards as ``<*>``."""

    raw: str
    tokens: tuple[Token, ...] = field(default=())

    def __post_init__(self):
        joined = " ".join(tok.text for tok in self.tokens)
        if joined != self.raw:
            raise ValueError(
                f"tokens do not reproduce raw text: {joined!r} != {self.raw!r}"
            )

    @classmethod
    def from_text(cls, text: str) -> "Template":
        """Build a template from arbitrary text, normalizing whitespace."""
        tokens = tokenize(text)
        return cls(" ".join(tok.text for tok in tokens), tokens)

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class LogRecord:
    """One labelled log message: body text plus its ground-truth template."""

    line_id: int
    content: str
    truth_template: Template

    def __post_init__(self):
        if self.line_id < 1:
            raise ValueError(f"line_id must be >= 1, got {self.line_id}")
        if not self.content.strip():
            raise ValueError("content must be non-empty after trimming")
