"""Dataset file parsing.

Formats (all UTF-8 text, '#' starts a comment line):
  edges     one "u v" (space or tab) pair per line
  features  CSV, optional header, row = node id followed by floats
  labels    one "node_id label" pair per line
  texts     one "node_id<TAB>text" record per line
  samples   node task: "node_id split"; link task: "u v label split"
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError, SchemaError
from .graph import SPLITS, Graph, Sample, build_graph


def _data_lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            yield lineno, stripped


def load_dataset(edge_path, feature_path=None, label_path=None) -> Graph:
    """Load a Graph from an edge list plus optional feature/label files.

    Node ids are defined by the edge list; features and labels referring to
    unknown ids are rejected.
    """
    pairs = []
    for lineno, line in _data_lines(edge_path):
        fields = line.split()
        if len(fields) != 2:
            raise ParseError(f"{edge_path}:{lineno}: expected 'u v', got {line!r}")
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise ParseError(f"{edge_path}:{lineno}: non-integer node id in {line!r}") from None
        if u == v:
            raise ParseError(f"{edge_path}:{lineno}: self-loop on node {u}")
        if u < 0 or v < 0:
            raise ParseError(f"{edge_path}:{lineno}: negative node id in {line!r}")
        pairs.append((u, v))
    if not pairs:
        raise SchemaError(f"{edge_path}: no edges found")
    n = max(max(u, v) for u, v in pairs) + 1

    features = None
    if feature_path is not None:
        features = _load_features(feature_path, n)
    labels = None
    if label_path is not None:
        labels = _load_labels(label_path, n)
    return build_graph(pairs, node_count=n, features=features, labels=labels)


def _load_features(path, node_count):
    rows = {}
    dim = None
    for lineno, line in _data_lines(path):
        fields = [f.strip() for f in line.split(",")]
        try:
            node = int(fields[0])
        except ValueError:
            if lineno == 1 or not rows:
                continue  # optional header row
            raise ParseError(f"{path}:{lineno}: non-integer node id {fields[0]!r}") from None
        try:
            vec = [float(x) for x in fields[1:]]
        except ValueError:
            raise ParseError(f"{path}:{lineno}: non-numeric feature value") from None
        if not vec:
            raise ParseError(f"{path}:{lineno}: feature row has no values")
        if dim is None:
            dim = len(vec)
        elif len(vec) != dim:
            raise SchemaError(f"{path}:{lineno}: feature dim {len(vec)} != {dim}")
        if not 0 <= node < node_count:
            raise SchemaError(f"{path}:{lineno}: unknown node id {node}")
        if node in rows:
            raise SchemaError(f"{path}:{lineno}: duplicate feature row for node {node}")
        rows[node] = vec
    if dim is None:
        raise SchemaError(f"{path}: no feature rows found")
    out = np.zeros((node_count, dim), dtype=np.float64)  # missing nodes get zeros
    for node, vec in rows.items():
        out[node] = vec
    return out


def _load_labels(path, node_count):
    labels = np.full(node_count, -1, dtype=np.int64)
    for lineno, line in _data_lines(path):
        fields = line.split()
        if len(fields) != 2:
            raise ParseError(f"{path}:{lineno}: expected 'node_id label', got {line!r}")
        try:
            node, label = int(fields[0]), int(fields[1])
        except ValueError:
            raise ParseError(f"{path}:{lineno}: non-integer value in {line!r}") from None
        if not 0 <= node < node_count:
            raise SchemaError(f"{path}:{lineno}: unknown node id {node}")
        labels[node] = label
    return labels


def load_texts(path, node_count=None) -> dict[int, str]:
    """Load per-node text; returns {node_id: text}."""
    texts = {}
    for lineno, line in _data_lines(path):
        if "\t" not in line:
            raise ParseError(f"{path}:{lineno}: expected 'node_id<TAB>text'")
        head, text = line.split("\t", 1)
        try:
            node = int(head)
        except ValueError:
            raise ParseError(f"{path}:{lineno}: non-integer node id {head!r}") from None
        if node_count is not None and not 0 <= node < node_count:
            raise SchemaError(f"{path}:{lineno}: unknown node id {node}")
        texts[node] = text
    return texts


def load_samples(path, task, graph: Graph) -> list[Sample]:
    """Load the sample/split file for the given task.

    Node-task labels come from the graph's label array; link-task labels are
    carried on the sample line.
    """
    samples = []
    for lineno, line in _data_lines(path):
        fields = line.split()
        if task == "node_classification":
            if len(fields) != 2:
                raise ParseError(f"{path}:{lineno}: expected 'node_id split'")
            try:
                node = int(fields[0])
            except ValueError:
                raise ParseError(f"{path}:{lineno}: non-integer node id") from None
            split = fields[1]
            if not 0 <= node < graph.node_count:
                raise SchemaError(f"{path}:{lineno}: unknown node id {node}")
            if graph.labels is None or graph.labels[node] < 0:
                raise SchemaError(f"{path}:{lineno}: node {node} has no label")
            targets = (node,)
            label = int(graph.labels[node])
        elif task == "link_prediction":
            if len(fields) != 4:
                raise ParseError(f"{path}:{lineno}: expected 'u v label split'")
            try:
                u, v, label = int(fields[0]), int(fields[1]), int(fields[2])
            except ValueError:
                raise ParseError(f"{path}:{lineno}: non-integer value") from None
            split = fields[3]
            for node in (u, v):
                if not 0 <= node < graph.node_count:
                    raise SchemaError(f"{path}:{lineno}: unknown node id {node}")
            if u == v:
                raise SchemaError(f"{path}:{lineno}: link sample with identical endpoints")
            if label not in (0, 1):
                raise SchemaError(f"{path}:{lineno}: link label must be 0 or 1")
            targets = (u, v)
        else:
            raise SchemaError(f"unknown task {task!r}")
        if split not in SPLITS:
            raise SchemaError(f"{path}:{lineno}: unknown split {split!r}")
        samples.append(Sample(id=len(samples), targets=targets, label=label, split=split))
    if not samples:
        raise SchemaError(f"{path}: no samples found")
    return samples


def load_split_map(path, task) -> dict[int, str]:
    """Sample id -> split name, without needing the graph (ids are line order)."""
    expected = 2 if task == "node_classification" else 4
    split_map = {}
    for lineno, line in _data_lines(path):
        fields = line.split()
        if len(fields) != expected:
            raise ParseError(f"{path}:{lineno}: expected {expected} fields")
        split = fields[-1]
        if split not in SPLITS:
            raise SchemaError(f"{path}:{lineno}: unknown split {split!r}")
        split_map[len(split_map)] = split
    if not split_map:
        raise SchemaError(f"{path}: no samples found")
    return split_map


@dataclass
class Dataset:
    """A loaded task: graph, samples, and optional per-node text."""

    graph: Graph
    samples: list[Sample]
    task: str
    texts: dict[int, str] | None = None

    def split_ids(self, split) -> np.ndarray:
        return np.array([s.id for s in self.samples if s.split == split], dtype=np.int64)

    @property
    def train_ids(self) -> np.ndarray:
        return self.split_ids("train")

    @property
    def val_ids(self) -> np.ndarray:
        return self.split_ids("validation")

    @property
    def test_ids(self) -> np.ndarray:
        return self.split_ids("test")


def load_task(task, edge_path, samples_path, feature_path=None, label_path=None,
              text_path=None) -> Dataset:
    graph = load_dataset(edge_path, feature_path, label_path)
    samples = load_samples(samples_path, task, graph)
    texts = load_texts(text_path, graph.node_count) if text_path else None
    return Dataset(graph=graph, samples=samples, task=task, texts=texts)


def dataset_paths(data_dir) -> dict[str, Path]:
    """Fixed file names produced by the synthetic generator."""
    d = Path(data_dir)
    return {
        "edges": d / "edges.tsv",
        "features": d / "features.csv",
        "labels": d / "labels.txt",
        "texts": d / "texts.tsv",
        "samples": d / "samples.tsv",
    }
