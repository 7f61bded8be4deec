"""Learner contract, the built-in logistic learner, and reference baselines.

The scheduler only needs five operations from a learner (train_on, loss_of,
proba_of, eval_on, snapshot/restore), so full GNN stacks can be swapped in
behind the same surface. The built-in learner is logistic regression over a
node's own features concatenated with the mean of its neighbors' features,
which is one message-passing round's worth of context: enough for sample
difficulty to correlate with the graph indices at desk scale.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.metrics import f1_score

from .competence import CompetenceParams, active_count
from .errors import ConfigurationError, DomainError, SchemaError
from .graph import Graph
from .io import Dataset


@runtime_checkable
class LearnerContract(Protocol):
    """Operations the scheduler drives a learner through."""

    def train_on(self, sample_ids) -> None: ...

    def loss_of(self, sample_ids) -> np.ndarray: ...

    def proba_of(self, sample_ids) -> np.ndarray: ...

    def eval_on(self, sample_ids) -> float: ...

    def snapshot(self): ...

    def restore(self, state) -> None: ...


def neighbor_features(g: Graph, node: int) -> np.ndarray:
    """Own features concatenated with the neighbor mean (zeros if isolated)."""
    if g.features is None:
        raise ConfigurationError("graph has no features loaded")
    own = g.features[node]
    nbrs = g.adjacency[node]
    agg = g.features[list(nbrs)].mean(axis=0) if nbrs else np.zeros_like(own)
    return np.concatenate([own, agg])


def neighbor_feature_matrix(g: Graph) -> np.ndarray:
    return np.stack([neighbor_features(g, v) for v in range(g.node_count)])


class NeighborLogisticLearner(BaseEstimator):
    """Logistic learner over 1-hop aggregated features.

    Node classification trains a multinomial head; link prediction scores a
    pair by the sigmoid of the dot product of the two projected endpoint
    representations. One ``train_on`` call is a single SGD pass in ascending
    sample-id order, deterministic under the seed.
    """

    def __init__(self, task: str = "node_classification", learning_rate: float = 0.01,
                 batch_size: int = 32, embed_dim: int = 16, weight_decay: float = 0.03,
                 init_scale: float | None = None, seed: int = 0):
        self.task = task
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.embed_dim = embed_dim
        self.weight_decay = weight_decay
        self.init_scale = init_scale
        self.seed = seed

    # -- binding to a dataset -------------------------------------------------

    def bind(self, dataset: Dataset) -> "NeighborLogisticLearner":
        if dataset.task != self.task:
            raise ConfigurationError(f"learner task {self.task!r} != dataset task "
                                     f"{dataset.task!r}")
        node_feats = neighbor_feature_matrix(dataset.graph)
        self.n_samples_ = len(dataset.samples)
        self.labels_ = np.array([s.label for s in dataset.samples], dtype=np.int64)
        rng = np.random.default_rng(self.seed)
        dim = node_feats.shape[1]
        if self.task == "node_classification":
            self.classes_ = np.unique(self.labels_)
            self.class_index_ = {c: i for i, c in enumerate(self.classes_)}
            self.y_ = np.array([self.class_index_[l] for l in self.labels_])
            self.phi_ = np.stack([node_feats[s.targets[0]] for s in dataset.samples])
            scale = 0.0 if self.init_scale is None else self.init_scale
            self.weights_ = scale * rng.standard_normal((dim, len(self.classes_)))
        elif self.task == "link_prediction":
            self.y_ = self.labels_.astype(np.float64)
            self.phi_u_ = np.stack([node_feats[s.targets[0]] for s in dataset.samples])
            self.phi_v_ = np.stack([node_feats[s.targets[1]] for s in dataset.samples])
            scale = 0.1 if self.init_scale is None else self.init_scale
            self.weights_ = scale * rng.standard_normal((dim, self.embed_dim))
        else:
            raise ConfigurationError(f"unknown task {self.task!r}")
        return self

    def _require_bound(self):
        if not hasattr(self, "weights_"):
            raise ConfigurationError("learner not bound to a dataset; call bind()")

    def _ids(self, sample_ids) -> np.ndarray:
        ids = np.asarray(sample_ids, dtype=np.int64)
        if ids.size and (ids.min() < 0 or ids.max() >= self.n_samples_):
            raise DomainError("sample id out of range")
        return ids

    # -- core math -------------------------------------------------------------

    def _node_forward(self, ids):
        z = self.phi_[ids] @ self.weights_
        z = z - z.max(axis=1, keepdims=True)
        expz = np.exp(z)
        proba = expz / expz.sum(axis=1, keepdims=True)
        return proba

    def _link_scores(self, ids):
        ru = self.phi_u_[ids] @ self.weights_
        rv = self.phi_v_[ids] @ self.weights_
        return (ru * rv).sum(axis=1), ru, rv

    def loss_and_grad(self, sample_ids):
        """Mean regularized loss and its analytic gradient on the samples."""
        self._require_bound()
        ids = self._ids(sample_ids)
        if ids.size == 0:
            raise DomainError("empty sample set")
        penalty = 0.5 * self.weight_decay * float((self.weights_ ** 2).sum())
        if self.task == "node_classification":
            proba = self._node_forward(ids)
            y = self.y_[ids]
            losses = -np.log(np.clip(proba[np.arange(ids.size), y], 1e-300, None))
            delta = proba
            delta[np.arange(ids.size), y] -= 1.0
            grad = self.phi_[ids].T @ delta / ids.size
        else:
            s, ru, rv = self._link_scores(ids)
            y = self.y_[ids]
            losses = np.maximum(s, 0.0) - s * y + np.log1p(np.exp(-np.abs(s)))
            sig = 1.0 / (1.0 + np.exp(-s))
            coef = (sig - y)[:, None]
            grad = (self.phi_u_[ids].T @ (coef * rv)
                    + self.phi_v_[ids].T @ (coef * ru)) / ids.size
        return float(losses.mean()) + penalty, grad + self.weight_decay * self.weights_

    # -- LearnerContract -------------------------------------------------------

    def train_on(self, sample_ids) -> None:
        """One SGD pass; batches run in ascending sample-id order."""
        self._require_bound()
        ids = np.sort(self._ids(sample_ids))
        for start in range(0, ids.size, self.batch_size):
            batch = ids[start:start + self.batch_size]
            _, grad = self.loss_and_grad(batch)
            self.weights_ = self.weights_ - self.learning_rate * grad

    def loss_of(self, sample_ids) -> np.ndarray:
        """Per-sample loss, aligned with the input order; no weight updates."""
        self._require_bound()
        ids = self._ids(sample_ids)
        if self.task == "node_classification":
            proba = self._node_forward(ids)
            return -np.log(np.clip(proba[np.arange(ids.size), self.y_[ids]],
                                   1e-300, None))
        s, _, _ = self._link_scores(ids)
        return np.maximum(s, 0.0) - s * self.y_[ids] + np.log1p(np.exp(-np.abs(s)))

    def proba_of(self, sample_ids) -> np.ndarray:
        """Correct-class probability per sample, aligned with the input order."""
        self._require_bound()
        ids = self._ids(sample_ids)
        if self.task == "node_classification":
            proba = self._node_forward(ids)
            return proba[np.arange(ids.size), self.y_[ids]]
        s, _, _ = self._link_scores(ids)
        sig = 1.0 / (1.0 + np.exp(-s))
        return np.where(self.y_[ids] > 0.5, sig, 1.0 - sig)

    def eval_on(self, sample_ids) -> float:
        self._require_bound()
        ids = self._ids(sample_ids)
        if ids.size == 0:
            raise DomainError("empty sample set")
        if self.task == "node_classification":
            pred = self._node_forward(ids).argmax(axis=1)
            return float((pred == self.y_[ids]).mean())
        s, _, _ = self._link_scores(ids)
        pred = (s > 0.0).astype(np.int64)
        return float(f1_score(self.y_[ids].astype(np.int64), pred, zero_division=0))

    def snapshot(self):
        self._require_bound()
        return self.weights_.copy()

    def restore(self, state) -> None:
        self.weights_ = np.asarray(state, dtype=np.float64).copy()

    def predict_proba(self, sample_ids) -> np.ndarray:
        """Full class-probability rows (node task only)."""
        self._require_bound()
        if self.task != "node_classification":
            raise ConfigurationError("predict_proba is only defined for node tasks")
        return self._node_forward(self._ids(sample_ids))

    # -- checkpointing ---------------------------------------------------------

    def save(self, path) -> None:
        self._require_bound()
        rows, cols = self.weights_.shape
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# task={self.task} rows={rows} cols={cols} seed={self.seed}\n")
            for r in range(rows):
                fh.write(",".join(repr(float(v)) for v in self.weights_[r]) + "\n")

    def load_weights(self, path) -> None:
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip()
            if not header.startswith("# task="):
                raise SchemaError(f"{path}: missing checkpoint header")
            meta = dict(f.split("=") for f in header[2:].split())
            if meta["task"] != self.task:
                raise SchemaError(f"{path}: checkpoint task {meta['task']!r} != {self.task!r}")
            rows = [np.array([float(v) for v in line.strip().split(",")])
                    for line in fh if line.strip()]
        w = np.stack(rows)
        expected = (int(meta["rows"]), int(meta["cols"]))
        if w.shape != expected:
            raise SchemaError(f"{path}: weight shape {w.shape} != header {expected}")
        self.weights_ = w


# ---------------------------------------------------------------------------
# reference baselines


@dataclass
class BaselineResult:
    learner: NeighborLogisticLearner
    presented_total: int
    presented_per_epoch: list[int]
    presentation_log: list[tuple[int, np.ndarray]]
    val_history: list[float]
    best_epoch: int
    val_metric: float


def _run_epochs(learner, dataset, epochs, select_for_epoch) -> BaselineResult:
    val_ids = dataset.val_ids
    if val_ids.size == 0:
        raise DomainError("dataset has no validation samples")
    best_metric, best_state, best_epoch = -np.inf, None, -1
    presented, log, history = [], [], []
    for epoch in range(epochs):
        ids = np.sort(np.asarray(select_for_epoch(epoch), dtype=np.int64))
        if ids.size == 0:
            raise DomainError(f"epoch {epoch}: empty training selection")
        learner.train_on(ids)
        log.append((epoch, ids))
        presented.append(int(np.unique(ids).size))
        metric = learner.eval_on(val_ids)
        history.append(metric)
        if metric > best_metric:
            best_metric, best_state, best_epoch = metric, learner.snapshot(), epoch
    learner.restore(best_state)
    return BaselineResult(learner=learner, presented_total=sum(presented),
                          presented_per_epoch=presented, presentation_log=log,
                          val_history=history, best_epoch=best_epoch,
                          val_metric=float(best_metric))


def baseline_nocl(learner, dataset: Dataset, epochs: int) -> BaselineResult:
    """Standard training: every training sample, every epoch."""
    train_ids = dataset.train_ids
    if train_ids.size == 0:
        raise DomainError("dataset has no training samples")
    return _run_epochs(learner, dataset, epochs, lambda epoch: train_ids)


def baseline_ccl(learner, dataset: Dataset, epochs: int, params: CompetenceParams,
                 difficulty_order: np.ndarray) -> BaselineResult:
    """Competence-based curriculum over a single summed-difficulty ranking."""
    order = np.asarray(difficulty_order, dtype=np.int64)
    if order.size == 0:
        raise DomainError("empty difficulty ranking")

    def select(epoch):
        return order[:active_count(epoch, order.size, params)]

    return _run_epochs(learner, dataset, epochs, select)
