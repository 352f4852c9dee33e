"""Overlapping community detection and extension on the mutual kNN graph.

Initial communities come from clique percolation: q-cliques chained whenever
they share q-1 nodes, communities being the node unions of the chained
cliques. Nodes left outside every initial community are then admitted into a
community whenever their distance-weighted connection strength reaches a
tolerance fraction of the community's internal connectivity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graph import DistanceMatrix, WeightedGraph

ORIGIN_INITIAL = "initial"
ORIGIN_EXTENDED = "extended"


@dataclass
class CommunitySet:
    """Overlapping node communities plus per-node membership lists.

    ``covered`` is the union of the *initial* communities; it stays frozen
    through extension because belongingness and internal connectivity are
    always computed against the initial structure. ``clique_size`` records
    the q that percolation actually used.
    """

    n_nodes: int
    communities: list[frozenset[int]]
    origin: list[str]
    covered: frozenset[int]
    clique_size: int = 3
    member_index: list[list[int]] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if len(self.origin) != len(self.communities):
            raise ValueError("origin tags must match the number of communities")
        self.member_index = [[] for _ in range(self.n_nodes)]
        for cid, members in enumerate(self.communities):
            for v in members:
                self.member_index[v].append(cid)

    @property
    def n_communities(self) -> int:
        return len(self.communities)

    def communities_of(self, v: int) -> list[int]:
        return self.member_index[v]

    def isolated_nodes(self) -> np.ndarray:
        """Nodes that belong to no community (attribute-outlier candidates)."""
        return np.array([v for v in range(self.n_nodes) if not self.member_index[v]],
                        dtype=np.int64)


@dataclass
class ExtensionParams:
    """Knobs for the community-extension pass."""

    tolerance: float
    percentile: float = 75.0
    clique_size: int = 8

    def __post_init__(self) -> None:
        if not 0.0 <= self.tolerance <= 1.0:
            raise ValueError("tolerance must lie in [0, 1]")
        if not 0.0 < self.percentile <= 100.0:
            raise ValueError("percentile must lie in (0, 100]")
        if self.clique_size < 2:
            raise ValueError("clique size must be at least 2")


def _neighbor_masks(g: WeightedGraph) -> list[int]:
    masks = []
    for v in range(g.n_nodes):
        m = 0
        for u in g.neighbors[v]:
            m |= 1 << int(u)
        masks.append(m)
    return masks


def _mask_to_nodes(mask: int) -> list[int]:
    nodes = []
    while mask:
        low = mask & -mask
        nodes.append(low.bit_length() - 1)
        mask ^= low
    return nodes


def maximal_cliques(g: WeightedGraph) -> list[frozenset[int]]:
    """All maximal cliques, via branch-and-bound with pivoting.

    Node sets are manipulated as integer bitmasks; recursion depth is bounded
    by the largest clique, which the mutual kNN degree cap keeps at k+1.
    """
    masks = _neighbor_masks(g)
    found: list[int] = []

    def expand(r: int, p: int, x: int) -> None:
        if p == 0 and x == 0:
            found.append(r)
            return
        px = p | x
        best_u, best_cnt = -1, -1
        m = px
        while m:
            low = m & -m
            u = low.bit_length() - 1
            m ^= low
            cnt = (p & masks[u]).bit_count()
            if cnt > best_cnt:
                best_cnt, best_u = cnt, u
        cand = p & ~masks[best_u]
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            expand(r | low, p & masks[v], x & masks[v])
            p ^= low
            x |= low
    if g.n_nodes:
        expand(0, (1 << g.n_nodes) - 1, 0)
    return [frozenset(_mask_to_nodes(m)) for m in found]


class _UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def choose_clique_size(clique_sizes: list[int]) -> int:
    """Pick a clique size from the graph's maximal-clique size distribution.

    Half the 75th-percentile maximal-clique size, clamped to [3, 8]: dense
    graphs (huge cliques) get a large q so percolation can fragment merged
    regions, sparse graphs keep a small q so the fringe stays covered.
    """
    sizes = [s for s in clique_sizes if s >= 2]
    if not sizes:
        return 3
    q = int(np.ceil(np.percentile(sizes, 75) / 2.0))
    return max(3, min(8, q))


def percolation_communities(g: WeightedGraph, q: int | None = None) -> CommunitySet:
    """Initial overlapping communities by q-clique percolation.

    Equivalent to chaining q-cliques that share q-1 nodes: maximal cliques of
    size >= q are connected whenever they overlap in >= q-1 nodes, and each
    community is the node union of one connected component. Edge weights are
    ignored; only the structure matters. With ``q=None`` the clique size is
    chosen per graph by :func:`choose_clique_size`.
    """
    if q is not None and q < 2:
        raise ValueError("clique size must be at least 2")
    all_cliques = maximal_cliques(g)
    if q is None:
        q = choose_clique_size([len(c) for c in all_cliques])
    cliques = [c for c in all_cliques if len(c) >= q]
    uf = _UnionFind(len(cliques))
    by_node: dict[int, list[int]] = {}
    for cid, clique in enumerate(cliques):
        for v in clique:
            by_node.setdefault(v, []).append(cid)
    checked: set[tuple[int, int]] = set()
    for ids in by_node.values():
        for a in range(len(ids)):
            for b in range(a + 1, len(ids)):
                pair = (ids[a], ids[b])
                if pair in checked:
                    continue
                checked.add(pair)
                if uf.find(pair[0]) == uf.find(pair[1]):
                    continue
                if len(cliques[pair[0]] & cliques[pair[1]]) >= q - 1:
                    uf.union(*pair)
    groups: dict[int, set[int]] = {}
    for cid, clique in enumerate(cliques):
        groups.setdefault(uf.find(cid), set()).update(clique)
    members = sorted({frozenset(nodes) for nodes in groups.values()},
                     key=lambda c: sorted(c))
    covered = frozenset().union(*members) if members else frozenset()
    return CommunitySet(g.n_nodes, members, [ORIGIN_INITIAL] * len(members),
                        covered, clique_size=q)


def belongingness(v: int, c: int, cs: CommunitySet, g: WeightedGraph) -> float:
    """Fraction of v's in-covered-set edges that stay inside community c.

    Ratio of v's degree in the subgraph induced by c to its degree in the
    subgraph induced by the union of all initial communities (unweighted
    counts). A member with no edges inside the union contributes 0.
    """
    if v not in cs.communities[c]:
        raise ValueError(f"node {v} is not a member of community {c}")
    nbrs = g.neighbors[v]
    deg_s = sum(1 for u in nbrs if int(u) in cs.covered)
    if deg_s == 0:
        return 0.0
    deg_c = sum(1 for u in nbrs if int(u) in cs.communities[c])
    return deg_c / deg_s


def internal_connectivity(c: int, cs: CommunitySet, g: WeightedGraph) -> float:
    """Sum of members' belongingness: the community's internal connectivity."""
    return float(sum(belongingness(v, c, cs, g) for v in cs.communities[c]))


def connection_strength(c: int, w: int, cs: CommunitySet, g: WeightedGraph,
                        dm: DistanceMatrix) -> float:
    """Distance-weighted pull of community c on an outside candidate node.

    Sums each member's belongingness scaled by 1/(d(w, member)+1); the
    candidate is treated as connected to every member, not just mkNN edges.
    """
    if w in cs.covered:
        raise ValueError(f"candidate node {w} already belongs to an initial community")
    total = 0.0
    for v in cs.communities[c]:
        total += belongingness(v, c, cs, g) / (dm.d[w, v] + 1.0)
    return total


def extension_tolerance(g: WeightedGraph, percentile: float = 75.0) -> float:
    """Nearest-rank percentile of the positive edge-weight distribution."""
    if not 0.0 < percentile <= 100.0:
        raise ValueError("percentile must lie in (0, 100]")
    weights = np.sort(np.array([w for _, _, w in g.edge_list()]))
    if weights.size == 0:
        raise ValueError("graph has no edges")
    rank = int(np.ceil(percentile / 100.0 * weights.size))
    return float(weights[max(rank, 1) - 1])


def extend_communities(cs: CommunitySet, g: WeightedGraph, dm: DistanceMatrix,
                       params: ExtensionParams) -> CommunitySet:
    """Admit outside nodes into initial communities in a single pass.

    Every node outside all initial communities joins community C iff
    CS(C, node) >= tolerance * IC(C), with belongingness and IC computed from
    the frozen initial memberships. Nodes can join several communities;
    nodes admitted nowhere stay isolated. The result is independent of
    iteration order.
    """
    candidates = np.array(sorted(set(range(cs.n_nodes)) - cs.covered), dtype=np.int64)
    new_members = [set(c) for c in cs.communities]
    origin = list(cs.origin)
    for cid, members in enumerate(cs.communities):
        m = np.array(sorted(members), dtype=np.int64)
        rho = np.array([belongingness(int(v), cid, cs, g) for v in m])
        ic = float(rho.sum())
        if candidates.size:
            strength = (1.0 / (dm.d[np.ix_(candidates, m)] + 1.0)) @ rho
            admitted = candidates[strength >= params.tolerance * ic]
            if admitted.size:
                new_members[cid].update(int(w) for w in admitted)
                origin[cid] = ORIGIN_EXTENDED
    return CommunitySet(cs.n_nodes, [frozenset(s) for s in new_members], origin,
                        cs.covered, clique_size=cs.clique_size)


def write_communities(cs: CommunitySet, path: str | Path) -> None:
    """Dump one community per line: ``id origin node,node,...``."""
    with Path(path).open("w") as fh:
        for cid, members in enumerate(cs.communities):
            nodes = ",".join(str(v) for v in sorted(members))
            fh.write(f"{cid} {cs.origin[cid]} {nodes}\n")
