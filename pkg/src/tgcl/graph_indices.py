"""Topological complexity indices computed on ego subgraphs.

26 indices in six groups (degree, centrality, flow, computing, connectivity,
basic). Node-valued indices are evaluated at the subgraph's target node(s)
and summed over them; set-valued indices report the set cardinality; the
heuristic families (covers, matchings, Ramsey, treewidth) break every
internal tie by ascending node id so scores are bit-reproducible.

Degenerate cases (undefined assortativity, centralities on edgeless graphs,
disconnected connectivity queries, non-converged power iterations) score 0.
"""
from __future__ import annotations

import logging
import math

import numpy as np

from .errors import DomainError
from .graph import Subgraph

log = logging.getLogger(__name__)
_warned_once = set()


def _warn_once(key, message, *args):
    if key in _warned_once:
        log.debug(message, *args)
    else:
        _warned_once.add(key)
        log.warning(message, *args)


POWER_MAX_ITER = 1000
POWER_TOL = 1e-6
KATZ_ALPHA = 0.1
KATZ_BETA = 1.0

GRAPH_INDEX_CATEGORIES = {
    "degree": "degree",
    "treewidth_min_degree": "degree",
    "degree_mixing_matrix": "degree",
    "average_neighbor_degree": "degree",
    "average_degree_connectivity": "degree",
    "degree_assortativity_coefficient": "degree",
    "katz_centrality": "centrality",
    "degree_centrality": "centrality",
    "closeness_centrality": "centrality",
    "eigenvector_centrality": "centrality",
    "group_degree_centrality": "centrality",
    "min_weighted_dominating_set": "flow",
    "min_weighted_vertex_cover": "flow",
    "min_edge_dominating_set": "flow",
    "min_maximal_matching": "flow",
    "ramsey_r2": "computing",
    "average_clustering": "computing",
    "resource_allocation_index": "computing",
    "subgraph_connectivity": "connectivity",
    "local_node_connectivity": "connectivity",
    "large_clique_size": "basic",
    "common_neighbors": "basic",
    "number_of_edges": "basic",
    "number_of_nodes": "basic",
    "density": "basic",
    "local_bridges": "basic",
}

GRAPH_INDEX_KINDS = tuple(GRAPH_INDEX_CATEGORIES)

# kinds defined on a pair of target nodes (link samples only)
PAIRWISE_KINDS = frozenset({
    "common_neighbors", "resource_allocation_index", "local_node_connectivity",
})

# node-valued kinds, evaluated at the target(s) and summed
_NODE_VALUED = frozenset({
    "degree", "average_neighbor_degree", "katz_centrality", "degree_centrality",
    "closeness_centrality", "eigenvector_centrality",
})


def node_task_kinds() -> tuple[str, ...]:
    """Index kinds applicable to single-target samples."""
    return tuple(k for k in GRAPH_INDEX_KINDS if k not in PAIRWISE_KINDS)


def _adj_sets(sg: Subgraph):
    return [set(a) for a in sg.adjacency]


# ---------------------------------------------------------------------------
# degree family

def degree_at(sg, node):
    return float(sg.degree(node))


def average_neighbor_degree_at(sg, node):
    nbrs = sg.adjacency[node]
    if not nbrs:
        return 0.0
    return sum(sg.degree(u) for u in nbrs) / len(nbrs)


def degree_mixing_mean(sg):
    """Mean of the joint degree-pair probability matrix over edge endpoints."""
    if not sg.edges:
        return 0.0
    degs = [sg.degree(v) for v in range(sg.node_count)]
    present = sorted({degs[u] for u, v in sg.edges} | {degs[v] for u, v in sg.edges})
    idx = {d: i for i, d in enumerate(present)}
    m = np.zeros((len(present), len(present)))
    for u, v in sg.edges:
        m[idx[degs[u]], idx[degs[v]]] += 1.0
        m[idx[degs[v]], idx[degs[u]]] += 1.0
    m /= m.sum()
    return float(m.mean())


def average_degree_connectivity_top(sg):
    """Average nearest-neighbor degree of the highest degree class present."""
    by_k = {}
    for v in range(sg.node_count):
        k = sg.degree(v)
        if k == 0:
            continue
        nbr_sum = sum(sg.degree(u) for u in sg.adjacency[v])
        acc = by_k.setdefault(k, [0.0, 0])
        acc[0] += nbr_sum
        acc[1] += 1
    if not by_k:
        return 0.0
    k = max(by_k)
    total, count = by_k[k]
    return total / (k * count)


def degree_assortativity(sg):
    """Pearson correlation of endpoint degrees over (symmetrized) edges."""
    if not sg.edges:
        return 0.0
    xs, ys = [], []
    for u, v in sg.edges:
        du, dv = sg.degree(u), sg.degree(v)
        xs.extend((du, dv))
        ys.extend((dv, du))
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    sx, sy = x.std(), y.std()
    if sx == 0.0 or sy == 0.0:
        return 0.0
    return float(((x - x.mean()) * (y - y.mean())).mean() / (sx * sy))


def treewidth_min_degree(sg):
    """Treewidth upper bound via min-degree elimination (ties by node id)."""
    adj = _adj_sets(sg)
    alive = set(range(sg.node_count))
    width = 0
    while alive:
        v = min(alive, key=lambda u: (len(adj[u]), u))
        width = max(width, len(adj[v]))
        nbrs = list(adj[v])
        for i, a in enumerate(nbrs):
            for b in nbrs[i + 1:]:
                adj[a].add(b)
                adj[b].add(a)
        for a in nbrs:
            adj[a].discard(v)
        adj[v].clear()
        alive.discard(v)
    return float(width)


# ---------------------------------------------------------------------------
# centrality family

def katz_centrality(sg, alpha=KATZ_ALPHA, beta=KATZ_BETA,
                    max_iter=POWER_MAX_ITER, tol=POWER_TOL):
    """Katz scores for all nodes, unit L2 norm; None when not converged.

    Fixed point of x <- alpha * A x + beta, reached only when
    alpha < 1/lambda_max; divergence is reported as non-convergence.
    """
    n = sg.node_count
    x = np.zeros(n)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(max_iter):
            nxt = np.full(n, beta)
            for v in range(n):
                row = sg.adjacency[v]
                if row:
                    nxt[v] += alpha * x.take(row).sum()
            delta = float(np.linalg.norm(nxt - x))
            x = nxt
            if not math.isfinite(delta):
                return None
            if delta < tol:
                norm = np.linalg.norm(x)
                return x / norm if norm > 0 else x
    return None


def eigenvector_centrality(sg, max_iter=POWER_MAX_ITER, tol=POWER_TOL):
    """Leading-eigenvector scores via power iteration on I + A, or None."""
    n = sg.node_count
    if not sg.edges:
        return None
    x = np.full(n, 1.0 / math.sqrt(n))
    for _ in range(max_iter):
        nxt = x.copy()
        for v in range(n):
            row = sg.adjacency[v]
            if row:
                nxt[v] += x.take(row).sum()
        nxt /= np.linalg.norm(nxt)
        if float(np.linalg.norm(nxt - x)) < tol:
            return nxt
        x = nxt
    return None


def degree_centrality_at(sg, node):
    if sg.node_count <= 1:
        return 0.0
    return sg.degree(node) / (sg.node_count - 1)


def _bfs_distances(sg, source):
    dist = {source: 0}
    frontier = [source]
    while frontier:
        nxt = []
        for u in frontier:
            for v in sg.adjacency[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    return dist


def closeness_centrality_at(sg, node):
    """Closeness with the component-size correction factor."""
    n = sg.node_count
    if n <= 1:
        return 0.0
    dist = _bfs_distances(sg, node)
    reachable = len(dist) - 1
    if reachable == 0:
        return 0.0
    total = sum(dist.values())
    return (reachable / total) * (reachable / (n - 1))


def group_degree_centrality(sg, group):
    """Fraction of non-group nodes adjacent to the group."""
    members = set(group)
    outside = sg.node_count - len(members)
    if outside <= 0:
        return 0.0
    touched = set()
    for v in members:
        touched.update(sg.adjacency[v])
    return len(touched - members) / outside


# ---------------------------------------------------------------------------
# flow family (approximation heuristics, all deterministic)

def min_weighted_dominating_set(sg):
    """Greedy unit-weight dominating set: max new coverage, ties by id."""
    adj = _adj_sets(sg)
    undominated = set(range(sg.node_count))
    chosen = set()
    while undominated:
        best = min(range(sg.node_count),
                   key=lambda v: (-len((adj[v] | {v}) & undominated), v))
        chosen.add(best)
        undominated -= adj[best] | {best}
    return chosen


def _greedy_maximal_matching(sg):
    matched = set()
    matching = set()
    for u, v in sg.edges:  # edges are sorted ascending
        if u not in matched and v not in matched:
            matching.add((u, v))
            matched.update((u, v))
    return matching


def min_weighted_vertex_cover(sg):
    """2-approximation: both endpoints of a greedy maximal matching."""
    cover = set()
    for u, v in _greedy_maximal_matching(sg):
        cover.update((u, v))
    return cover


def min_edge_dominating_set(sg):
    """Edge dominating set via a greedy maximal matching."""
    return _greedy_maximal_matching(sg)


def min_maximal_matching(sg):
    """Small maximal matching: repeatedly take the edge that touches the
    most still-free edges (ties by ascending edge), yielding a maximal
    matching that is near-minimum on small graphs."""
    free = list(sg.edges)
    matched = set()
    matching = set()
    while free:
        def coverage(e):
            u, v = e
            return sum(1 for a, b in free if a in (u, v) or b in (u, v))
        best = min(free, key=lambda e: (-coverage(e), e))
        matching.add(best)
        matched.update(best)
        free = [e for e in free if e[0] not in matched and e[1] not in matched]
    return matching


# ---------------------------------------------------------------------------
# computing family

def ramsey_r2(sg):
    """Recursive Ramsey construction; returns (clique, independent_set)."""
    adj = _adj_sets(sg)

    def rec(nodes):
        if not nodes:
            return set(), set()
        v = min(nodes)
        nbrs = adj[v] & nodes
        rest = nodes - adj[v] - {v}
        c1, i1 = rec(nbrs)
        c2, i2 = rec(rest)
        c1.add(v)
        i2.add(v)
        return (c1 if len(c1) >= len(c2) else c2), (i1 if len(i1) >= len(i2) else i2)

    return rec(set(range(sg.node_count)))


def average_clustering(sg):
    """Exact mean local clustering coefficient (degree < 2 counts as 0)."""
    n = sg.node_count
    if n == 0:
        return 0.0
    adj = _adj_sets(sg)
    total = 0.0
    for v in range(n):
        k = len(adj[v])
        if k < 2:
            continue
        nbrs = sorted(adj[v])
        links = sum(1 for i, a in enumerate(nbrs) for b in nbrs[i + 1:] if b in adj[a])
        total += 2.0 * links / (k * (k - 1))
    return total / n


def resource_allocation_index(sg, u, v):
    shared = set(sg.adjacency[u]) & set(sg.adjacency[v])
    return sum(1.0 / sg.degree(k) for k in shared)


# ---------------------------------------------------------------------------
# connectivity family (exact, via unit-capacity max flow with node splitting)

def _max_flow_vertex(sg, s, t, removed_edge=None):
    """Max number of internally vertex-disjoint s-t paths."""
    n = sg.node_count
    # node v maps to v_in = 2v, v_out = 2v + 1
    cap = {}

    def add(a, b, c):
        cap[(a, b)] = cap.get((a, b), 0) + c
        cap.setdefault((b, a), 0)

    big = n + 1
    for v in range(n):
        add(2 * v, 2 * v + 1, 1 if v not in (s, t) else big)
    for u, v in sg.edges:
        if removed_edge is not None and (u, v) == removed_edge:
            continue
        add(2 * u + 1, 2 * v, big)
        add(2 * v + 1, 2 * u, big)
    out = {}
    for (a, b) in cap:
        out.setdefault(a, []).append(b)

    source, sink = 2 * s + 1, 2 * t
    flow = 0
    while True:
        parent = {source: None}
        queue = [source]
        while queue and sink not in parent:
            nxt = []
            for a in queue:
                for b in sorted(out.get(a, ())):
                    if b not in parent and cap[(a, b)] > 0:
                        parent[b] = a
                        nxt.append(b)
            queue = nxt
        if sink not in parent:
            return flow
        b = sink
        while parent[b] is not None:
            a = parent[b]
            cap[(a, b)] -= 1
            cap[(b, a)] += 1
            b = a
        flow += 1


def local_node_connectivity(sg, s, t):
    """Minimum vertex cut between s and t (Menger); adjacent pairs count the
    direct edge as one path plus the cut in the graph without that edge."""
    if s == t:
        raise DomainError("local connectivity needs two distinct targets")
    if t in sg.adjacency[s]:
        e = (min(s, t), max(s, t))
        return 1 + _max_flow_vertex(sg, s, t, removed_edge=e)
    return _max_flow_vertex(sg, s, t)


def subgraph_connectivity(sg):
    """Vertex connectivity of the subgraph; 0 when disconnected."""
    n = sg.node_count
    if n <= 1:
        return 0
    if len(_bfs_distances(sg, 0)) < n:
        return 0
    if all(sg.degree(v) == n - 1 for v in range(n)):
        return n - 1
    v = min(range(n), key=lambda u: (sg.degree(u), u))
    vset = set(sg.adjacency[v])
    best = sg.degree(v)
    for w in range(n):
        if w != v and w not in vset:
            best = min(best, local_node_connectivity(sg, v, w))
    nbrs = sorted(vset)
    for i, x in enumerate(nbrs):
        for y in nbrs[i + 1:]:
            if y not in sg.adjacency[x]:
                best = min(best, local_node_connectivity(sg, x, y))
    return best


# ---------------------------------------------------------------------------
# basic family

def large_clique(sg):
    """Greedy clique (most-connected candidate first), cross-checked against
    the Ramsey clique; returns the larger set."""
    n = sg.node_count
    adj = _adj_sets(sg)
    best = set()
    if n:
        clique = set()
        candidates = set(range(n))
        while candidates:
            v = min(candidates, key=lambda u: (-len(adj[u] & candidates), u))
            clique.add(v)
            candidates &= adj[v]
        best = clique
    ramsey_clique, _ = ramsey_r2(sg)
    return best if len(best) >= len(ramsey_clique) else ramsey_clique


def common_neighbors(sg, u, v):
    return len(set(sg.adjacency[u]) & set(sg.adjacency[v]))


def density(sg, literal=False):
    """Undirected density 2e/(v(v-1)); ``literal`` selects e/(v(v-1))."""
    v = sg.node_count
    if v < 2:
        return 0.0
    e = sg.edge_count
    return (e if literal else 2.0 * e) / (v * (v - 1))


def local_bridges(sg):
    """Number of edges whose endpoints share no neighbor."""
    adj = _adj_sets(sg)
    return sum(1 for u, v in sg.edges if not (adj[u] & adj[v]))


# ---------------------------------------------------------------------------
# dispatch

def _targets_of(sg, kind):
    if not sg.target_local_ids:
        raise DomainError(f"{kind}: subgraph has no targets")
    return sg.target_local_ids


def _pair_of(sg, kind):
    t = sg.target_local_ids
    if len(t) != 2:
        raise DomainError(f"{kind} needs exactly 2 targets, got {len(t)}")
    return t


def compute_index(kind: str, sg: Subgraph, literal_density: bool = False) -> float:
    """Raw complexity score of ``kind`` on ``sg``; always finite."""
    if sg.node_count == 0:
        raise DomainError("cannot score an empty subgraph")
    if kind == "degree":
        return float(sum(degree_at(sg, t) for t in _targets_of(sg, kind)))
    if kind == "treewidth_min_degree":
        return treewidth_min_degree(sg)
    if kind == "degree_mixing_matrix":
        return degree_mixing_mean(sg)
    if kind == "average_neighbor_degree":
        return float(sum(average_neighbor_degree_at(sg, t) for t in _targets_of(sg, kind)))
    if kind == "average_degree_connectivity":
        return average_degree_connectivity_top(sg)
    if kind == "degree_assortativity_coefficient":
        return degree_assortativity(sg)
    if kind == "katz_centrality":
        scores = katz_centrality(sg)
        if scores is None:
            _warn_once("katz", "katz centrality did not converge (scoring 0); "
                       "first seen on a %d-node subgraph", sg.node_count)
            return 0.0
        return float(sum(scores[t] for t in _targets_of(sg, kind)))
    if kind == "degree_centrality":
        return float(sum(degree_centrality_at(sg, t) for t in _targets_of(sg, kind)))
    if kind == "closeness_centrality":
        return float(sum(closeness_centrality_at(sg, t) for t in _targets_of(sg, kind)))
    if kind == "eigenvector_centrality":
        scores = eigenvector_centrality(sg)
        if scores is None:
            _warn_once("eigenvector", "eigenvector centrality degenerate or not "
                       "converged (scoring 0); first seen on a %d-node subgraph",
                       sg.node_count)
            return 0.0
        return float(sum(scores[t] for t in _targets_of(sg, kind)))
    if kind == "group_degree_centrality":
        return group_degree_centrality(sg, _targets_of(sg, kind))
    if kind == "min_weighted_dominating_set":
        return float(len(min_weighted_dominating_set(sg)))
    if kind == "min_weighted_vertex_cover":
        return float(len(min_weighted_vertex_cover(sg)))
    if kind == "min_edge_dominating_set":
        return float(len(min_edge_dominating_set(sg)))
    if kind == "min_maximal_matching":
        return float(len(min_maximal_matching(sg)))
    if kind == "ramsey_r2":
        clique, indep = ramsey_r2(sg)
        return float(len(clique) * len(indep))
    if kind == "average_clustering":
        return average_clustering(sg)
    if kind == "resource_allocation_index":
        return resource_allocation_index(sg, *_pair_of(sg, kind))
    if kind == "subgraph_connectivity":
        return float(subgraph_connectivity(sg))
    if kind == "local_node_connectivity":
        return float(local_node_connectivity(sg, *_pair_of(sg, kind)))
    if kind == "large_clique_size":
        return float(len(large_clique(sg)))
    if kind == "common_neighbors":
        return float(common_neighbors(sg, *_pair_of(sg, kind)))
    if kind == "number_of_edges":
        return float(sg.edge_count)
    if kind == "number_of_nodes":
        return float(sg.node_count)
    if kind == "density":
        return density(sg, literal=literal_density)
    if kind == "local_bridges":
        return float(local_bridges(sg))
    raise DomainError(f"unknown graph index kind {kind!r}")
