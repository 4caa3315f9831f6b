"""logbench: log template extraction toolkit and benchmark harness."""

from .datasets import Dataset, load_dataset, truth_grouping
from .drain import ClusterAssignment, DrainParser, drain_parse
from .extraction import (
    REFUSED,
    ExtractionOutcome,
    ExtractionStatus,
    canonicalize,
    extract_delimited,
)
from .llm import (
    BackendConfig,
    RawResponse,
    ResponseCache,
    cached_complete,
    complete,
    make_backend,
)
from .llm_parser import LLMTemplateParser, extract_template
from .metrics import (
    MetricsReport,
    Prediction,
    evaluate,
    group_accuracy,
    levenshtein,
    mean_edit_distance,
    message_level_accuracy,
)
from .prompts import Demonstration, PromptSpec, PromptVariant, render_prompt, select_demonstrations
from .runner import ExperimentConfig, render_report, replay_run, run_experiment
from .templates import LogRecord, Template, Token, TokenKind, WILDCARD, is_wildcard, tokenize

__version__ = "0.1.0"

__all__ = [
    "BackendConfig",
    "ClusterAssignment",
    "Dataset",
    "Demonstration",
    "DrainParser",
    "ExperimentConfig",
    "ExtractionOutcome",
    "ExtractionStatus",
    "LLMTemplateParser",
    "LogRecord",
    "MetricsReport",
    "Prediction",
    "PromptSpec",
    "PromptVariant",
    "RawResponse",
    "REFUSED",
    "ResponseCache",
    "Template",
    "Token",
    "TokenKind",
    "WILDCARD",
    "cached_complete",
    "canonicalize",
    "complete",
    "drain_parse",
    "evaluate",
    "extract_delimited",
    "extract_template",
    "group_accuracy",
    "is_wildcard",
    "levenshtein",
    "load_dataset",
    "make_backend",
    "mean_edit_distance",
    "message_level_accuracy",
    "render_prompt",
    "render_report",
    "replay_run",
    "run_experiment",
    "select_demonstrations",
    "tokenize",
    "truth_grouping",
]
