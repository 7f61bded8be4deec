import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tgcl.graph import Sample, build_graph
from tgcl.io import Dataset, load_task
from tgcl.synth import make_planted_dataset


@pytest.fixture(scope="session")
def bench_dataset(tmp_path_factory):
    """The 400-node planted-partition benchmark (seed 7), loaded once."""
    out = tmp_path_factory.mktemp("bench")
    paths = make_planted_dataset(out, nodes=400, dim=16, seed=7)
    return load_task("node_classification", paths["edges"], paths["samples"],
                     feature_path=paths["features"], label_path=paths["labels"],
                     text_path=paths["texts"])


@pytest.fixture(scope="session")
def small_dataset(tmp_path_factory):
    """A 120-node variant for faster pipeline-level tests."""
    out = tmp_path_factory.mktemp("small")
    paths = make_planted_dataset(out, nodes=120, dim=8, seed=11)
    return load_task("node_classification", paths["edges"], paths["samples"],
                     feature_path=paths["features"], label_path=paths["labels"],
                     text_path=paths["texts"])


@pytest.fixture()
def tiny_dataset():
    """Hand-built 8-node, 2-class dataset (no files involved)."""
    edges = [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (4, 5), (4, 6), (5, 6), (6, 7)]
    features = [[1.0, 0.0], [0.9, 0.1], [1.1, -0.1], [0.5, 0.5],
                [0.0, 1.0], [0.1, 0.9], [-0.1, 1.1], [0.2, 0.8]]
    labels = [0, 0, 0, 0, 1, 1, 1, 1]
    g = build_graph(edges, features=features, labels=labels)
    samples = [Sample(id=i, targets=(i,), label=labels[i],
                      split="train" if i % 2 == 0 else "validation")
               for i in range(8)]
    return Dataset(graph=g, samples=samples, task="node_classification")
