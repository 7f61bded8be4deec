"""Deterministic synthetic benchmark: a planted-partition node-classification
dataset with class-correlated features and per-node text.

Identical parameters and seed produce byte-identical files, so runs are
reproducible end to end.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .io import dataset_paths

_EASY_WORDS = (
    "graph", "node", "edge", "link", "path", "data", "model", "train",
    "test", "score", "rank", "tree", "walk", "layer", "block", "label",
)
_HARD_WORDS = (
    "aggregation", "representation", "classification", "optimization",
    "regularization", "centrality", "connectivity", "complexity",
    "curriculum", "repetition", "neighborhood", "propagation",
)


def make_planted_dataset(out_dir, nodes: int = 400, blocks: int = 2,
                         p_in: float = 0.05, p_out: float = 0.005,
                         dim: int = 16, seed: int = 7, noise: float = 4.0,
                         train_frac: float = 0.7, val_frac: float = 0.15):
    """Generate and write the dataset files; returns the path map."""
    if nodes < 2 * blocks or blocks < 2:
        raise ConfigurationError("need at least 2 blocks and 2 nodes per block")
    if not (0.0 < train_frac and 0.0 < val_frac and train_frac + val_frac < 1.0):
        raise ConfigurationError("train_frac/val_frac must leave room for a test split")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    labels = np.arange(nodes) % blocks

    same = labels[:, None] == labels[None, :]
    prob = np.where(same, p_in, p_out)
    draw = rng.random((nodes, nodes))
    iu, ju = np.triu_indices(nodes, k=1)
    mask = draw[iu, ju] < prob[iu, ju]
    edges = set(zip(iu[mask].tolist(), ju[mask].tolist()))

    # patch isolated nodes: connect to the next node of the same block
    touched = set()
    for u, v in edges:
        touched.update((u, v))
    for v in range(nodes):
        if v not in touched:
            w = (v + blocks) % nodes
            while labels[w] != labels[v] or w == v:
                w = (w + 1) % nodes
            edges.add((min(v, w), max(v, w)))
            touched.update((v, w))

    mu = rng.normal(0.0, 1.0, size=(blocks, dim))
    feats = mu[labels] + noise * rng.normal(0.0, 1.0, size=(nodes, dim))

    texts = []
    for v in range(nodes):
        hard_p = 0.15 + 0.5 * labels[v] / (blocks - 1)
        n_sent = 1 + int(rng.integers(3))
        sents = []
        for _ in range(n_sent):
            n_words = 3 + int(rng.integers(8))
            words = []
            for _ in range(n_words):
                pool = _HARD_WORDS if rng.random() < hard_p else _EASY_WORDS
                words.append(pool[int(rng.integers(len(pool)))])
            sents.append(" ".join(words).capitalize() + ".")
        texts.append(" ".join(sents))

    perm = rng.permutation(nodes)
    n_train = int(round(train_frac * nodes))
    n_val = int(round(val_frac * nodes))
    split = np.empty(nodes, dtype=object)
    split[perm[:n_train]] = "train"
    split[perm[n_train:n_train + n_val]] = "validation"
    split[perm[n_train + n_val:]] = "test"

    paths = dataset_paths(out)
    with open(paths["edges"], "w", encoding="utf-8") as fh:
        fh.write(f"# planted partition: nodes={nodes} blocks={blocks} "
                 f"p_in={p_in} p_out={p_out} seed={seed}\n")
        for u, v in sorted(edges):
            fh.write(f"{u}\t{v}\n")
    with open(paths["features"], "w", encoding="utf-8") as fh:
        fh.write("node," + ",".join(f"f{j}" for j in range(dim)) + "\n")
        for v in range(nodes):
            fh.write(f"{v}," + ",".join(repr(float(x)) for x in feats[v]) + "\n")
    with open(paths["labels"], "w", encoding="utf-8") as fh:
        for v in range(nodes):
            fh.write(f"{v} {labels[v]}\n")
    with open(paths["texts"], "w", encoding="utf-8") as fh:
        for v in range(nodes):
            fh.write(f"{v}\t{texts[v]}\n")
    with open(paths["samples"], "w", encoding="utf-8") as fh:
        for v in range(nodes):
            fh.write(f"{v} {split[v]}\n")
    return paths
