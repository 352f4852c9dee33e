"""Weighted mutual k-nearest-neighbor graph construction.

Distances are stored densely (N x N float64), which is fine for the desk
scale this package targets (up to ~20k rows); larger inputs will exhaust
memory before anything else breaks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .dataset import LabeledDataset, _freeze


@dataclass
class DistanceMatrix:
    """Symmetric pairwise distances with a zero diagonal."""

    d: np.ndarray

    def __post_init__(self) -> None:
        self.d = _freeze(np.asarray(self.d, dtype=np.float64))
        if self.d.ndim != 2 or self.d.shape[0] != self.d.shape[1]:
            raise ValueError("distance matrix must be square")

    @property
    def n(self) -> int:
        return self.d.shape[0]


@dataclass
class WeightedGraph:
    """Mutual kNN graph: symmetric sparse adjacency with weights 1/(d+1).

    Edges exist only between mutual k-nearest neighbors, so every node has at
    most ``k`` incident edges and all weights lie in (0, 1].
    """

    n_nodes: int
    adjacency: sp.csr_matrix
    k: int
    distances: DistanceMatrix
    neighbors: list[np.ndarray] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        adj = sp.csr_matrix(self.adjacency)
        adj.setdiag(0)
        adj.eliminate_zeros()
        self.adjacency = adj
        self.neighbors = [np.sort(adj.indices[adj.indptr[i]:adj.indptr[i + 1]])
                          for i in range(self.n_nodes)]

    @property
    def n_edges(self) -> int:
        return self.adjacency.nnz // 2

    def edge_list(self) -> list[tuple[int, int, float]]:
        """Edges (i, j, weight) with i < j, ordered lexicographically."""
        coo = sp.triu(self.adjacency, k=1).tocoo()
        order = np.lexsort((coo.col, coo.row))
        return [(int(coo.row[t]), int(coo.col[t]), float(coo.data[t])) for t in order]

    def degree(self, v: int) -> int:
        return len(self.neighbors[v])

    @classmethod
    def from_distance_edges(cls, dm: DistanceMatrix, edges: list[tuple[int, int]],
                            k: int) -> "WeightedGraph":
        """Build a graph from an explicit edge list, weighting by 1/(d+1)."""
        n = dm.n
        adj = sp.lil_matrix((n, n))
        for i, j in edges:
            w = 1.0 / (dm.d[i, j] + 1.0)
            adj[i, j] = w
            adj[j, i] = w
        return cls(n, adj.tocsr(), k, dm)


def pairwise_distances(ds: LabeledDataset, metric: str = "euclidean") -> DistanceMatrix:
    """Exact symmetric Euclidean distances between all sample pairs."""
    if metric != "euclidean":
        raise ValueError(f"unsupported metric: {metric}")
    x = ds.features
    if not np.isfinite(x).all():
        raise ValueError("features contain non-finite values")
    n = x.shape[0]
    d = np.empty((n, n), dtype=np.float64)
    # Row-wise broadcast keeps the per-pair expression identical to a scalar
    # loop, so d[i, j] == d[j, i] bit for bit ((a-b)^2 == (b-a)^2 exactly).
    for i in range(n):
        diff = x - x[i]
        d[i] = np.sqrt((diff * diff).sum(axis=1))
        d[i, i] = 0.0
    return DistanceMatrix(d)


def knn_sets(dm: DistanceMatrix, k: int) -> list[np.ndarray]:
    """The k nearest other nodes per node, nearest first.

    Ties are broken toward the lower node index; the node itself is excluded.
    """
    n = dm.n
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must lie in 1..{n - 1}, got {k}")
    out = []
    for i in range(n):
        order = np.argsort(dm.d[i], kind="stable")
        order = order[order != i]
        out.append(order[:k].copy())
    return out


def mutual_knn_graph(ds: LabeledDataset, k: int, metric: str = "euclidean") -> WeightedGraph:
    """Build the weighted mutual kNN graph of a dataset.

    Edge (i, j) exists iff j is among i's k nearest neighbors and vice versa;
    its weight is 1/(d(i,j)+1).
    """
    return graph_from_distances(pairwise_distances(ds, metric), k)


def graph_from_distances(dm: DistanceMatrix, k: int) -> WeightedGraph:
    """Mutual kNN graph from a precomputed distance matrix."""
    n = dm.n
    member = np.zeros((n, n), dtype=bool)
    for i, nbrs in enumerate(knn_sets(dm, k)):
        member[i, nbrs] = True
    mutual = member & member.T
    rows, cols = np.nonzero(mutual)
    weights = 1.0 / (dm.d[rows, cols] + 1.0)
    adj = sp.csr_matrix((weights, (rows, cols)), shape=(n, n))
    return WeightedGraph(n, adj, k, dm)


def write_edge_list(g: WeightedGraph, path: str | Path) -> None:
    """Dump edges as ``i j weight`` lines (0-based, 12 significant digits)."""
    with Path(path).open("w") as fh:
        for i, j, w in g.edge_list():
            fh.write(f"{i} {j} {w:.12g}\n")
