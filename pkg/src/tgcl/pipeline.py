"""Index matrix construction, redundancy-aware index selection, and ranking.

Raw scores are computed per sample (link samples sum the two per-endpoint
subgraph scores; pairwise kinds use the joint two-target subgraph), columns
are L2-normalized with norms learned on the training split only, indices are
de-duplicated by clustering their correlation profile, and each surviving
(index, order) pair becomes a fixed ranking the scheduler can activate.
"""
from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from . import graph_indices, text_indices
from .errors import ConfigurationError, DomainError, ParseError, SchemaError
from .graph import extract_ego_subgraph
from .io import Dataset

SORT_ORDERS = ("ascending", "descending", "medium_ascending", "medium_descending")

PAIR_SEP = "/"


def pair_id(index_name: str, order: str) -> str:
    return f"{index_name}{PAIR_SEP}{order}"


def split_pair_id(pid: str) -> tuple[str, str]:
    index_name, sep, order = pid.rpartition(PAIR_SEP)
    if not sep or order not in SORT_ORDERS:
        raise DomainError(f"malformed pair id {pid!r}")
    return index_name, order


@dataclass
class IndexMatrix:
    sample_ids: np.ndarray
    index_names: tuple[str, ...]
    raw: np.ndarray
    normalized: np.ndarray
    splits: np.ndarray | None = None
    constant_columns: tuple[str, ...] = field(default=())

    def column(self, index_name: str, normalized: bool = True) -> np.ndarray:
        try:
            j = self.index_names.index(index_name)
        except ValueError:
            raise DomainError(f"index {index_name!r} not in matrix") from None
        return (self.normalized if normalized else self.raw)[:, j]

    def rows_of(self, split: str) -> np.ndarray:
        if self.splits is None:
            raise ConfigurationError("matrix has no split information attached")
        return np.flatnonzero(self.splits == split)


class L2ColumnScaler(BaseEstimator, TransformerMixin):
    """Scale columns by the L2 norm learned from the fitted (training) rows.

    All-zero columns keep scale 1 so they stay all-zero instead of NaN.
    """

    def fit(self, X, y=None):
        X = np.asarray(X, dtype=np.float64)
        norms = np.linalg.norm(X, axis=0)
        self.scale_ = np.where(norms > 0.0, norms, 1.0)
        return self

    def transform(self, X):
        return np.asarray(X, dtype=np.float64) / self.scale_


def _score_sample(dataset: Dataset, sample, graph_kinds, text_kinds, hops, node_cap):
    row = np.empty(len(graph_kinds) + len(text_kinds), dtype=np.float64)
    col = 0
    if graph_kinds:
        if len(sample.targets) == 1:
            sg = extract_ego_subgraph(dataset.graph, sample.targets, hops, node_cap)
            for kind in graph_kinds:
                row[col] = graph_indices.compute_index(kind, sg)
                col += 1
        else:
            egos = [extract_ego_subgraph(dataset.graph, (t,), hops, node_cap)
                    for t in sample.targets]
            joint = None
            for kind in graph_kinds:
                if kind in graph_indices.PAIRWISE_KINDS:
                    if joint is None:
                        joint = extract_ego_subgraph(dataset.graph, sample.targets,
                                                     hops, node_cap)
                    row[col] = graph_indices.compute_index(kind, joint)
                else:
                    row[col] = sum(graph_indices.compute_index(kind, sg) for sg in egos)
                col += 1
    if text_kinds:
        texts = dataset.texts or {}
        stats = [text_indices.analyze_text(texts.get(t, "")) for t in sample.targets]
        for kind in text_kinds:
            row[col] = sum(text_indices.compute_text_index(kind, st) for st in stats)
            col += 1
    return row


_WORKER_CTX = {}


def _init_worker(dataset, graph_kinds, text_kinds, hops, node_cap):
    _WORKER_CTX["args"] = (dataset, graph_kinds, text_kinds, hops, node_cap)


def _score_chunk(sample_chunk):
    dataset, graph_kinds, text_kinds, hops, node_cap = _WORKER_CTX["args"]
    return [_score_sample(dataset, s, graph_kinds, text_kinds, hops, node_cap)
            for s in sample_chunk]


def default_graph_kinds(task: str) -> tuple[str, ...]:
    if task == "link_prediction":
        return graph_indices.GRAPH_INDEX_KINDS
    return graph_indices.node_task_kinds()


def build_index_matrix(dataset: Dataset, graph_kinds=None, text_kinds=None,
                       hops: int = 1, node_cap: int = 256,
                       threads: int = 1) -> IndexMatrix:
    """Score every sample on every requested index and L2-normalize columns.

    Normalization is fit on training rows and applied unchanged to the other
    splits, so validation statistics never leak into the curriculum.
    """
    if not dataset.samples:
        raise DomainError("dataset has no samples")
    if graph_kinds is None:
        graph_kinds = default_graph_kinds(dataset.task)
    graph_kinds = tuple(graph_kinds)
    if text_kinds is None:
        text_kinds = text_indices.TEXT_INDEX_KINDS if dataset.texts else ()
    text_kinds = tuple(text_kinds)
    for kind in graph_kinds:
        if kind not in graph_indices.GRAPH_INDEX_CATEGORIES:
            raise ConfigurationError(f"unknown graph index kind {kind!r}")
        if kind in graph_indices.PAIRWISE_KINDS and dataset.task != "link_prediction":
            raise DomainError(f"{kind} requires two-target (link) samples")
    for kind in text_kinds:
        if kind not in text_indices.TEXT_INDEX_CATEGORIES:
            raise ConfigurationError(f"unknown text index kind {kind!r}")
    if text_kinds and dataset.texts is None:
        raise ConfigurationError("text indices requested but the dataset has no texts")
    names = graph_kinds + text_kinds
    if not names:
        raise ConfigurationError("no index kinds requested")

    samples = dataset.samples
    if threads > 1:
        chunks = [samples[i::threads] for i in range(threads)]
        with concurrent.futures.ProcessPoolExecutor(
                max_workers=threads, initializer=_init_worker,
                initargs=(dataset, graph_kinds, text_kinds, hops, node_cap)) as pool:
            per_chunk = list(pool.map(_score_chunk, chunks))
        raw = np.empty((len(samples), len(names)), dtype=np.float64)
        for offset, rows in enumerate(per_chunk):
            for k, row in enumerate(rows):
                raw[offset + k * threads] = row
    else:
        raw = np.stack([_score_sample(dataset, s, graph_kinds, text_kinds,
                                      hops, node_cap) for s in samples])

    sample_ids = np.array([s.id for s in samples], dtype=np.int64)
    splits = np.array([s.split for s in samples])
    train_rows = np.flatnonzero(splits == "train")
    if train_rows.size == 0:
        raise DomainError("dataset has no training samples")
    scaler = L2ColumnScaler().fit(raw[train_rows])
    normalized = scaler.transform(raw)
    constant = tuple(names[j] for j in range(len(names))
                     if np.ptp(raw[train_rows, j]) == 0.0)
    return IndexMatrix(sample_ids=sample_ids, index_names=names, raw=raw,
                       normalized=normalized, splits=splits,
                       constant_columns=constant)


# ---------------------------------------------------------------------------
# index selection (correlation profile clustering)


def correlation_matrix(columns: np.ndarray) -> np.ndarray:
    """Pearson correlation between columns; callers exclude constant ones."""
    return np.corrcoef(columns, rowvar=False)


def _kmeans_pp_init(X, k, rng):
    n = X.shape[0]
    centers = [X[rng.integers(n)]]
    for _ in range(1, k):
        d2 = np.min([np.sum((X - c) ** 2, axis=1) for c in centers], axis=0)
        total = d2.sum()
        if total <= 0.0:
            centers.append(X[int(rng.integers(n))])
        else:
            centers.append(X[int(rng.choice(n, p=d2 / total))])
    return np.stack(centers)


def _lloyd(X, centers, max_iter=100):
    labels = None
    for _ in range(max_iter):
        d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = d2.argmin(axis=1)
        for c in range(centers.shape[0]):
            members = new_labels == c
            if members.any():
                centers[c] = X[members].mean(axis=0)
            else:  # re-seed an emptied cluster on the farthest point
                far = int(d2.min(axis=1).argmax())
                centers[c] = X[far]
                new_labels[far] = c
        if labels is not None and np.array_equal(labels, new_labels):
            break
        labels = new_labels
    inertia = float(((X - centers[labels]) ** 2).sum())
    return labels, inertia


def kmeans_cluster(X, k, seed, restarts: int = 100, max_iter: int = 100):
    """Seeded k-means++ with Lloyd iterations until assignments stabilize."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] < k:
        raise ConfigurationError(f"cannot form {k} clusters from {X.shape[0]} points")
    rng = np.random.default_rng(seed)
    best_labels, best_inertia = None, np.inf
    for _ in range(restarts):
        centers = _kmeans_pp_init(X, k, rng)
        labels, inertia = _lloyd(X, centers, max_iter=max_iter)
        if inertia < best_inertia - 1e-12:
            best_labels, best_inertia = labels, inertia
    return best_labels


class IndexSelector(BaseEstimator):
    """Pick one representative index per correlation cluster.

    fit() clusters the rows of the index-correlation matrix with seeded
    k-means and draws one member per cluster at random under the seed.
    """

    def __init__(self, k_clusters: int = 10, seed: int = 0, restarts: int = 100):
        self.k_clusters = k_clusters
        self.seed = seed
        self.restarts = restarts

    def fit(self, X, names=None):
        X = np.asarray(X, dtype=np.float64)
        if names is None:
            names = tuple(f"index_{j}" for j in range(X.shape[1]))
        names = tuple(names)
        keep = [j for j in range(X.shape[1]) if np.ptp(X[:, j]) > 0.0]
        if len(keep) < self.k_clusters:
            raise ConfigurationError(
                f"only {len(keep)} non-constant indices but k_clusters="
                f"{self.k_clusters}; lower --clusters")
        corr = correlation_matrix(X[:, keep])
        labels = kmeans_cluster(corr, self.k_clusters, self.seed,
                                restarts=self.restarts)
        rng = np.random.default_rng(self.seed)
        chosen = []
        for c in range(self.k_clusters):
            members = [keep[i] for i in np.flatnonzero(labels == c)]
            chosen.append(members[int(rng.integers(len(members)))])
        self.cluster_of_ = {names[keep[i]]: int(labels[i]) for i in range(len(keep))}
        self.selected_ = tuple(names[j] for j in sorted(chosen))
        self.correlation_ = corr
        return self

    def fit_select(self, matrix: IndexMatrix):
        rows = matrix.rows_of("train")
        return self.fit(matrix.normalized[rows], names=matrix.index_names)


def select_indices(matrix: IndexMatrix, k_clusters: int = 10, seed: int = 0):
    """Returns (selected index names, {index: cluster id})."""
    selector = IndexSelector(k_clusters=k_clusters, seed=seed).fit_select(matrix)
    return selector.selected_, selector.cluster_of_


# ---------------------------------------------------------------------------
# ranking


@dataclass(frozen=True)
class RankingTable:
    pair: tuple[str, str]
    train_order: np.ndarray
    val_order: np.ndarray

    @property
    def pair_id(self) -> str:
        return pair_id(*self.pair)


def _order_ids(ids: np.ndarray, values: np.ndarray, order: str) -> np.ndarray:
    if ids.size == 0:
        return ids.copy()
    if order in ("medium_ascending", "medium_descending"):
        std = values.std()
        z = (values - values.mean()) / std if std > 0.0 else np.zeros_like(values)
        key = np.abs(z)
    else:
        key = values
    if order in ("descending", "medium_descending"):
        key = -key
    perm = np.lexsort((ids, key))
    return ids[perm]


def rank_samples(matrix: IndexMatrix, index_name: str, order: str) -> RankingTable:
    """Fixed train/validation orderings for one (index, order) pair.

    Ascending/descending sort the normalized score; the medium orders sort
    by |z| of the within-split standard score. All ties break by sample id.
    """
    if order not in SORT_ORDERS:
        raise ConfigurationError(f"unknown sort order {order!r}")
    col = matrix.column(index_name)
    orders = []
    for split in ("train", "validation"):
        rows = matrix.rows_of(split)
        orders.append(_order_ids(matrix.sample_ids[rows], col[rows], order))
    return RankingTable(pair=(index_name, order), train_order=orders[0],
                        val_order=orders[1])


def build_pair_tables(matrix: IndexMatrix, index_names, orders=SORT_ORDERS):
    """RankingTables for every (index, order) combination, in a stable order."""
    tables = []
    for name in index_names:
        for order in orders:
            tables.append(rank_samples(matrix, name, order))
    if not tables:
        raise ConfigurationError("no (index, order) pairs configured")
    return tables


def summed_difficulty_order(matrix: IndexMatrix) -> np.ndarray:
    """Training ids by ascending sum of normalized indices (CCL's ranking)."""
    rows = matrix.rows_of("train")
    total = matrix.normalized[rows].sum(axis=1)
    return _order_ids(matrix.sample_ids[rows], total, "ascending")


# ---------------------------------------------------------------------------
# persistence

MATRIX_HEADER = "sample_id,index_name,raw,normalized"


def save_index_matrix(matrix: IndexMatrix, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(MATRIX_HEADER + "\n")
        for i, sid in enumerate(matrix.sample_ids):
            for j, name in enumerate(matrix.index_names):
                fh.write(f"{sid},{name},{float(matrix.raw[i, j])!r},"
                         f"{float(matrix.normalized[i, j])!r}\n")


def load_index_matrix(path, split_map=None) -> IndexMatrix:
    """Read a matrix CSV back; ``split_map`` optionally attaches splits."""
    sample_order: list[int] = []
    name_order: list[str] = []
    cells = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != MATRIX_HEADER:
            raise SchemaError(f"{path}: expected header {MATRIX_HEADER!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if len(fields) != 4:
                raise ParseError(f"{path}:{lineno}: expected 4 fields")
            try:
                sid = int(fields[0])
                raw_v, norm_v = float(fields[2]), float(fields[3])
            except ValueError:
                raise ParseError(f"{path}:{lineno}: malformed numeric field") from None
            name = fields[1]
            if sid not in cells:
                sample_order.append(sid)
            if name not in name_order:
                name_order.append(name)
            cells.setdefault(sid, {})[name] = (raw_v, norm_v)
    if not sample_order:
        raise SchemaError(f"{path}: empty matrix")
    raw = np.zeros((len(sample_order), len(name_order)))
    normalized = np.zeros_like(raw)
    for i, sid in enumerate(sample_order):
        row = cells[sid]
        if len(row) != len(name_order):
            raise SchemaError(f"{path}: sample {sid} is missing index values")
        for j, name in enumerate(name_order):
            raw[i, j], normalized[i, j] = row[name]
    splits = None
    if split_map is not None:
        try:
            splits = np.array([split_map[sid] for sid in sample_order])
        except KeyError as exc:
            raise SchemaError(f"{path}: sample {exc.args[0]} missing from split map") from None
    return IndexMatrix(sample_ids=np.array(sample_order, dtype=np.int64),
                       index_names=tuple(name_order), raw=raw,
                       normalized=normalized, splits=splits)


def save_selection(path, selected, cluster_of) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# index\tcluster\tselected\n")
        for name in cluster_of:
            flag = 1 if name in selected else 0
            fh.write(f"{name}\t{cluster_of[name]}\t{flag}\n")


def load_selection(path):
    selected, cluster_of = [], {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ParseError(f"{path}:{lineno}: expected 3 tab-separated fields")
            name, cluster, flag = fields
            cluster_of[name] = int(cluster)
            if flag == "1":
                selected.append(name)
    return tuple(selected), cluster_of
