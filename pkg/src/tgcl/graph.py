"""Graph storage and ego-subgraph extraction.

The dataset graph is undirected, unweighted, and immutable after
construction; samples point at one (node tasks) or two (link tasks) target
nodes, and complexity indices are computed on the k-hop ego subgraph around
those targets.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SchemaError

SPLITS = ("train", "validation", "test")


@dataclass(frozen=True)
class Graph:
    """Undirected graph with sorted neighbor lists.

    ``features`` is an optional (node_count, dim) float matrix and ``labels``
    an optional int array with -1 for unlabeled nodes.
    """

    node_count: int
    edges: tuple[tuple[int, int], ...]
    adjacency: tuple[tuple[int, ...], ...]
    features: np.ndarray | None = None
    labels: np.ndarray | None = None

    def degree(self, node: int) -> int:
        return len(self.adjacency[node])

    def neighbors(self, node: int) -> tuple[int, ...]:
        return self.adjacency[node]


@dataclass(frozen=True)
class Sample:
    """One training instance: a node (``targets`` of size 1) or a node pair."""

    id: int
    targets: tuple[int, ...]
    label: int
    split: str

    def __post_init__(self):
        if len(self.targets) not in (1, 2):
            raise DomainError(f"sample {self.id}: expected 1 or 2 targets, got {len(self.targets)}")
        if self.split not in SPLITS:
            raise DomainError(f"sample {self.id}: unknown split {self.split!r}")


@dataclass
class Subgraph:
    """Induced subgraph over ``node_ids`` with local (0-based) adjacency."""

    node_ids: tuple[int, ...]
    adjacency: tuple[tuple[int, ...], ...]
    target_local_ids: tuple[int, ...]
    edges: tuple[tuple[int, int], ...] = field(default=())

    @property
    def node_count(self) -> int:
        return len(self.node_ids)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def degree(self, local: int) -> int:
        return len(self.adjacency[local])


def build_graph(edge_pairs, node_count=None, features=None, labels=None) -> Graph:
    """Assemble a Graph from (u, v) pairs, deduplicating and symmetrizing.

    Self-loops are rejected; node_count defaults to max id + 1.
    """
    seen = set()
    for u, v in edge_pairs:
        if u == v:
            raise SchemaError(f"self-loop on node {u}")
        if u < 0 or v < 0:
            raise SchemaError(f"negative node id in edge ({u}, {v})")
        seen.add((min(u, v), max(u, v)))
    edges = tuple(sorted(seen))
    inferred = max((max(u, v) for u, v in edges), default=-1) + 1
    n = inferred if node_count is None else node_count
    if inferred > n:
        raise SchemaError(f"edge references node {inferred - 1} but node_count is {n}")
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    adjacency = tuple(tuple(sorted(a)) for a in adj)
    if features is not None:
        features = np.asarray(features, dtype=np.float64)
        if features.shape[0] != n:
            raise SchemaError(f"feature rows ({features.shape[0]}) != node_count ({n})")
    if labels is not None:
        labels = np.asarray(labels, dtype=np.int64)
        if labels.shape[0] != n:
            raise SchemaError(f"label rows ({labels.shape[0]}) != node_count ({n})")
    return Graph(node_count=n, edges=edges, adjacency=adjacency,
                 features=features, labels=labels)


def extract_ego_subgraph(g: Graph, targets, hops: int = 1, node_cap: int = 256) -> Subgraph:
    """Induced union of the k-hop neighborhoods of ``targets``.

    When the union exceeds ``node_cap``, targets are kept and the remainder
    filled nearest-first (BFS layer, then ascending node id), so extraction
    is deterministic.
    """
    targets = tuple(sorted(set(int(t) for t in targets)))
    if not targets:
        raise DomainError("ego extraction needs at least one target")
    for t in targets:
        if not 0 <= t < g.node_count:
            raise DomainError(f"target node {t} not in graph of size {g.node_count}")
    if hops < 1:
        raise DomainError(f"hops must be >= 1, got {hops}")
    if node_cap < len(targets):
        raise DomainError(f"node_cap {node_cap} below target count {len(targets)}")

    layer = {t: 0 for t in targets}
    frontier = list(targets)
    for depth in range(1, hops + 1):
        nxt = []
        for u in frontier:
            for v in g.adjacency[u]:
                if v not in layer:
                    layer[v] = depth
                    nxt.append(v)
        frontier = nxt
        if not frontier:
            break

    keep = sorted(layer, key=lambda v: (layer[v], v))[:node_cap]
    node_ids = tuple(sorted(keep))
    local = {v: i for i, v in enumerate(node_ids)}
    member = set(node_ids)
    adj = []
    edges = []
    for v in node_ids:
        row = tuple(local[u] for u in g.adjacency[v] if u in member)
        adj.append(row)
        for u in g.adjacency[v]:
            if u in member and v < u:
                edges.append((local[v], local[u]))
    return Subgraph(node_ids=node_ids, adjacency=tuple(adj),
                    target_local_ids=tuple(local[t] for t in targets),
                    edges=tuple(sorted(edges)))
