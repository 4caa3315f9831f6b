"""Fixed-depth prefix-tree log parser: the offline heuristic baseline.

Messages are routed through a tree first by token count, then by their
leading tokens (digit-bearing tokens share a wildcard branch, and branch
fan-out is capped). Leaf clusters accumulate messages whose positional
token similarity clears a threshold; positions that disagree are rewritten
to ``<*>`` in the cluster template.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .base import check_messages
from .templates import LogRecord, Template, WILDCARD


class _Node:
    __slots__ = ("children", "clusters")

    def __init__(self):
        self.children: dict[str, _Node] = {}
        self.clusters: list[int] = []


@dataclass
class _Cluster:
    template: list[str]
    size: int = 1


def _has_digit(token: str) -> bool:
    return any(ch.isdigit() for ch in token)


class DrainParser(BaseEstimator):
    """Tree-based online log template miner with a scikit-learn surface.

    Parameters
    ----------
    depth : tree depth counting the length and token-prefix levels (>= 3);
        routing uses the first ``depth - 2`` tokens.
    similarity_threshold : minimum fraction of positionally equal tokens
        for a message to join an existing cluster, in (0, 1].
    max_children : fan-out cap per internal node; overflow tokens share the
        wildcard branch.
    preprocess_patterns : regex strings substituted with ``<*>`` before
        parsing (e.g. IP addresses, block ids).

    Fitted attributes: ``labels_`` (cluster id per fitted message),
    ``cluster_templates_`` (cluster id -> template text), ``n_clusters_``.
    """

    def __init__(
        self,
        depth: int = 4,
        similarity_threshold: float = 0.5,
        max_children: int = 100,
        preprocess_patterns: Sequence[str] = (),
    ):
        self.depth = depth
        self.similarity_threshold = similarity_threshold
        self.max_children = max_children
        self.preprocess_patterns = preprocess_patterns

    # -- scikit-learn API ----------------------------------------------

    def fit(self, X: Iterable[str], y=None) -> "DrainParser":
        """Parse messages in order, building the tree and cluster set."""
        self._validate_params()
        messages = check_messages(X)
        compiled = [re.compile(p) for p in self.preprocess_patterns]
        self._root: dict[int, _Node] = {}
        self._clusters: list[_Cluster] = []
        labels = []
        for message in messages:
            tokens = self._prepare(message, compiled)
            leaf = self._route(tokens, create=True)
            cluster_id = self._match(leaf, tokens)
            if cluster_id is None:
                cluster_id = len(self._clusters)
                self._clusters.append(_Cluster(template=list(tokens)))
                leaf.clusters.append(cluster_id)
            else:
                self._absorb(self._clusters[cluster_id], tokens)
            labels.append(cluster_id)
        self.labels_ = labels
        self.cluster_templates_ = {
            cid: " ".join(cluster.template) for cid, cluster in enumerate(self._clusters)
        }
        self.n_clusters_ = len(self._clusters)
        return self

    def fit_transform(self, X: Iterable[str], y=None) -> list[str]:
        """Fit, then return each fitted message's final cluster template.

        Assignment happens online (a message keeps the cluster it joined)
        but the reported template is the cluster's fully merged final form.
        """
        self.fit(X)
        return [self.cluster_templates_[label] for label in self.labels_]

    def transform(self, X: Iterable[str]) -> list[str]:
        """Match new messages against the fitted tree without changing it.

        A message that matches no cluster falls back to its own normalized
        text as a singleton template.
        """
        check_is_fitted(self, "cluster_templates_")
        compiled = [re.compile(p) for p in self.preprocess_patterns]
        out = []
        for message in check_messages(X):
            tokens = self._prepare(message, compiled)
            leaf = self._route(tokens, create=False)
            cluster_id = self._match(leaf, tokens) if leaf is not None else None
            if cluster_id is None:
                out.append(" ".join(tokens))
            else:
                out.append(self.cluster_templates_[cluster_id])
        return out

    # -- internals -------------------------------------------------------

    def _validate_params(self) -> None:
        if self.depth < 3:
            raise ValueError(f"depth must be >= 3, got {self.depth}")
        if not 0.0 < self.similarity_threshold <= 1.0:
            raise ValueError(
                f"similarity_threshold must be in (0, 1], got {self.similarity_threshold}"
            )
        if self.max_children < 1:
            raise ValueError(f"max_children must be >= 1, got {self.max_children}")

    @staticmethod
    def _prepare(message: str, compiled: list[re.Pattern]) -> list[str]:
        for pattern in compiled:
            message = pattern.sub(WILDCARD, message)
        return message.split()

    def _route(self, tokens: list[str], create: bool) -> Optional[_Node]:
        length = len(tokens)
        node = self._root.get(length)
        if node is None:
            if not create:
                return None
            node = self._root[length] = _Node()
        for token in tokens[: self.depth - 2]:
            node = self._descend(node, token, create)
            if node is None:
                return None
        return node

    def _descend(self, node: _Node, token: str, create: bool) -> Optional[_Node]:
        key = WILDCARD if _has_digit(token) else token
        child = node.children.get(key)
        if child is not None:
            return child
        if not create:
            return node.children.get(WILDCARD)
        if key == WILDCARD:
            node.children[WILDCARD] = _Node()
            return node.children[WILDCARD]
        # Fan-out cap: the final slot is reserved for the wildcard branch,
        # which absorbs every token seen after the cap is reached.
        if WILDCARD in node.children:
            if len(node.children) < self.max_children:
                node.children[key] = _Node()
                return node.children[key]
            return node.children[WILDCARD]
        if len(node.children) + 1 < self.max_children:
            node.children[key] = _Node()
            return node.children[key]
        node.children[WILDCARD] = _Node()
        return node.children[WILDCARD]

    def _match(self, leaf: _Node, tokens: list[str]) -> Optional[int]:
        best_id = None
        best_sim = -1.0
        denominator = max(len(tokens), 1)
        for cluster_id in leaf.clusters:
            template = self._clusters[cluster_id].template
            matching = sum(1 for a, b in zip(template, tokens) if a == b)
            similarity = matching / denominator
            if similarity > best_sim:
                best_sim = similarity
                best_id = cluster_id
        if best_id is not None and best_sim >= self.similarity_threshold:
            return best_id
        return None

    @staticmethod
    def _absorb(cluster: _Cluster, tokens: list[str]) -> None:
        cluster.size += 1
        template = cluster.template
        for position, token in enumerate(tokens):
            if template[position] != token:
                template[position] = WILDCARD


@dataclass(frozen=True)
class ClusterAssignment:
    """Final per-line cluster ids and per-cluster merged templates."""

    cluster_by_line: dict[int, int]
    template_by_cluster: dict[int, Template]

    def template_for(self, line_id: int) -> Template:
        return self.template_by_cluster[self.cluster_by_line[line_id]]


def drain_parse(
    records: Sequence[LogRecord], params: Optional[Mapping] = None
) -> ClusterAssignment:
    """Parse labelled records with DrainParser and return the assignment."""
    parser = DrainParser(**dict(params or {}))
    parser.fit([record.content for record in records])
    templates = {
        cid: Template.from_text(text) for cid, text in parser.cluster_templates_.items()
    }
    by_line = {record.line_id: label for record, label in zip(records, parser.labels_)}
    return ClusterAssignment(cluster_by_line=by_line, template_by_cluster=templates)


# -- per-dataset parameter files ---------------------------------------------

def parse_drain_config(text: str) -> dict[str, dict]:
    """Parse a plain key-value parameter file into per-dataset kwargs.

    Format: ``[DatasetName]`` sections holding ``depth``,
    ``similarity_threshold``, ``max_children``, and repeatable ``pattern``
    lines. ``#`` starts a comment line.
    """
    sections: dict[str, dict] = {}
    current: Optional[dict] = None
    for number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            current = sections.setdefault(name, {})
            continue
        if current is None:
            raise ValueError(f"line {number}: key-value pair before any [dataset] section")
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"line {number}: expected 'key = value', got {line!r}")
        key, value = key.strip(), value.strip()
        if key == "depth":
            current["depth"] = int(value)
        elif key == "similarity_threshold":
            current["similarity_threshold"] = float(value)
        elif key == "max_children":
            current["max_children"] = int(value)
        elif key == "pattern":
            current.setdefault("preprocess_patterns", []).append(value)
        else:
            raise ValueError(f"line {number}: unknown key {key!r}")
    return sections


def load_drain_config(path: str | Path) -> dict[str, dict]:
    return parse_drain_config(Path(path).read_text(encoding="utf-8"))


def default_drain_config() -> dict[str, dict]:
    """Per-dataset settings shipped with the package."""
    from importlib.resources import files

    return parse_drain_config(
        files("logbench").joinpath("data/drain_defaults.conf").read_text(encoding="utf-8")
    )


def drain_params_for(dataset_name: str, overrides: Optional[Mapping[str, dict]] = None) -> dict:
    """Resolve DrainParser kwargs for a dataset: defaults, then overrides."""
    params = default_drain_config().get(dataset_name, {}).copy()
    if overrides and dataset_name in overrides:
        params.update(overrides[dataset_name])
    return params
