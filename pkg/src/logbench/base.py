"""Input validation helpers shared by the parser estimators."""

from __future__ import annotations

from typing import Iterable


def check_messages(X: Iterable) -> list[str]:
    """Validate and materialize a collection of log message strings."""
    if isinstance(X, str):
        raise TypeError("expected a collection of log messages, got a single string")
    messages = list(X)
    for position, message in enumerate(messages):
        if not isinstance(message, str):
            raise TypeError(
                f"log message at position {position} is {type(message).__name__}, expected str"
            )
    return messages
