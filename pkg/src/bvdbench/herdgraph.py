"""Undirected neighbor graph and the network covariates derived from it."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True, eq=False)
class NeighborGraph:
    """Undirected simple graph over herd identifiers.

    ``neighbors[i]`` holds the indices (into ``node_ids``) adjacent to node i.
    Symmetric, no self-loops, no multi-edges.
    """

    node_ids: tuple
    neighbors: tuple

    def __post_init__(self):
        if len(self.node_ids) < 1:
            raise ValueError("graph must have at least one node")
        if len(self.neighbors) != len(self.node_ids):
            raise ValueError("adjacency size does not match node count")
        for i, adj in enumerate(self.neighbors):
            for j in adj:
                if j == i:
                    raise ValueError(f"self-loop at node {self.node_ids[i]!r}")
                if i not in self.neighbors[j]:
                    raise ValueError("adjacency is not symmetric")

    @classmethod
    def from_edges(cls, node_ids: Sequence, edges: Iterable[tuple]) -> "NeighborGraph":
        index = {nid: i for i, nid in enumerate(node_ids)}
        if len(index) != len(node_ids):
            raise ValueError("duplicate node ids")
        adj = [set() for _ in node_ids]
        for a, b in edges:
            if a not in index or b not in index:
                raise ValueError(f"edge ({a!r}, {b!r}) references unknown node")
            if a == b:
                raise ValueError(f"self-loop at node {a!r}")
            ia, ib = index[a], index[b]
            adj[ia].add(ib)
            adj[ib].add(ia)
        return cls(
            node_ids=tuple(node_ids),
            neighbors=tuple(tuple(sorted(s)) for s in adj),
        )

    @property
    def n_nodes(self) -> int:
        return len(self.node_ids)

    @property
    def n_edges(self) -> int:
        return sum(len(a) for a in self.neighbors) // 2


@dataclass(frozen=True)
class Centralities:
    """Per-node centrality arrays aligned with the graph's node order."""

    degree: np.ndarray
    betweenness: np.ndarray
    closeness: np.ndarray


def centralities(graph: NeighborGraph) -> Centralities:
    """Degree, shortest-path betweenness and closeness for every node.

    Betweenness is unnormalized with each unordered pair counted once;
    pairs with several shortest paths contribute fractionally (Brandes
    accumulation). Closeness is (number of reachable nodes) / (sum of
    distances to them), 0 for isolated nodes, which keeps disconnected
    graphs well defined.
    """
    n = graph.n_nodes
    degree = np.array([len(a) for a in graph.neighbors], dtype=int)
    betweenness = np.zeros(n)
    closeness = np.zeros(n)

    for s in range(n):
        # BFS from s, counting shortest paths
        dist = np.full(n, -1, dtype=int)
        sigma = np.zeros(n)
        dist[s] = 0
        sigma[s] = 1.0
        preds = [[] for _ in range(n)]
        order = []
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in graph.neighbors[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)

        reachable = len(order) - 1
        if reachable > 0:
            closeness[s] = reachable / dist[order].sum()

        # dependency accumulation, farthest first
        delta = np.zeros(n)
        for w in reversed(order):
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                betweenness[w] += delta[w]

    betweenness /= 2.0  # each unordered pair visited from both endpoints
    return Centralities(degree=degree, betweenness=betweenness, closeness=closeness)


def local_density(graph: NeighborGraph, statuses) -> np.ndarray:
    """Fraction of each node's neighbors with positive status; 0 when isolated."""
    st = np.asarray(statuses, dtype=int)
    if st.shape != (graph.n_nodes,):
        raise ValueError(
            f"got {st.shape[0] if st.ndim == 1 else 'non-1-D'} statuses for {graph.n_nodes} nodes"
        )
    if not np.all((st == 0) | (st == 1)):
        raise ValueError("statuses must be 0 or 1")
    out = np.zeros(graph.n_nodes)
    for i, adj in enumerate(graph.neighbors):
        if adj:
            out[i] = st[list(adj)].sum() / len(adj)
    return out
