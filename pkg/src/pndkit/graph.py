"""Binary undirected graphs and shortest-path efficiency metrics.

Graphs are immutable: node count plus a canonical, deduplicated edge array
with endpoints stored as ``i < j``. Distance matrices are dense numpy arrays
of hop counts with ``inf`` marking unreachable pairs, so that pair efficiency
``1 / d`` is exactly 0 for them. All metrics treat node pairs as unordered
and distinct.
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    NodeCountMismatch,
    NoReachablePairs,
    OutOfRange,
    SelfLoop,
    TooFewNodes,
)

UNREACHABLE = float("inf")

# aliases for the two matrix shapes that travel between modules: hop counts
# with inf sentinels, and symmetric per-pair real values with zero diagonal
DistanceMatrix = np.ndarray
PairMeasure = np.ndarray

# above this size the dense frontier-expansion BFS is swapped for the
# sparse per-source BFS from scipy to keep memory at O(n + m)
_DENSE_BFS_LIMIT = 1500


class Graph:
    """Immutable binary undirected graph on nodes ``0 .. node_count - 1``.

    Parameters
    ----------
    node_count : int
        Number of nodes; isolated nodes are allowed.
    edges : iterable of (int, int)
        Edge list in any order/orientation. Duplicates collapse; endpoints
        are canonicalised to ``i < j``.

    Raises
    ------
    OutOfRange
        If an endpoint is negative or >= node_count.
    SelfLoop
        If an edge connects a node to itself.
    """

    __slots__ = ("node_count", "_edges", "__dict__")

    def __init__(self, node_count: int, edges: Iterable[tuple[int, int]]):
        if node_count < 0:
            raise OutOfRange(f"node_count must be non-negative, got {node_count}")
        self.node_count = int(node_count)
        arr = np.asarray(list(edges), dtype=np.int64)
        if arr.size == 0:
            arr = np.empty((0, 2), dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("edges must be pairs of node indices")
        if arr.size and (arr.min() < 0 or arr.max() >= node_count):
            bad = arr[(arr < 0).any(axis=1) | (arr >= node_count).any(axis=1)][0]
            raise OutOfRange(f"edge {tuple(bad)} outside [0, {node_count})")
        if arr.size and (arr[:, 0] == arr[:, 1]).any():
            bad = arr[arr[:, 0] == arr[:, 1]][0]
            raise SelfLoop(f"self-loop at node {bad[0]}")
        lo = arr.min(axis=1)
        hi = arr.max(axis=1)
        arr = np.unique(np.column_stack([lo, hi]), axis=0)
        arr.setflags(write=False)
        self._edges = arr

    @property
    def edge_array(self) -> np.ndarray:
        """Canonical (m, 2) int array of edges, sorted, read-only."""
        return self._edges

    @property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(map(tuple, self._edges.tolist()))

    @property
    def edge_count(self) -> int:
        return self._edges.shape[0]

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.node_count, dtype=np.int64)
        if self.edge_count:
            np.add.at(deg, self._edges[:, 0], 1)
            np.add.at(deg, self._edges[:, 1], 1)
        deg.setflags(write=False)
        return deg

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Dense boolean adjacency matrix (read-only)."""
        a = np.zeros((self.node_count, self.node_count), dtype=bool)
        if self.edge_count:
            a[self._edges[:, 0], self._edges[:, 1]] = True
            a[self._edges[:, 1], self._edges[:, 0]] = True
        a.setflags(write=False)
        return a

    @cached_property
    def distances(self) -> np.ndarray:
        """All-pairs hop counts; see :func:`all_pairs_distances`."""
        return all_pairs_distances(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.node_count == other.node_count and np.array_equal(
            self._edges, other._edges
        )

    def __hash__(self) -> int:
        return hash((self.node_count, self._edges.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.node_count}, m={self.edge_count})"


def build_graph(node_count: int, edge_list: Iterable[tuple[int, int]]) -> Graph:
    """Construct a canonicalised :class:`Graph` from a raw edge list."""
    return Graph(node_count, edge_list)


def union_graphs(graphs: Sequence[Graph]) -> Graph:
    """Union of the edge sets of ``graphs`` on their shared node set.

    Raises
    ------
    NodeCountMismatch
        If the graphs disagree on node_count.
    """
    if not graphs:
        raise ValueError("union of zero graphs is undefined")
    n = graphs[0].node_count
    for g in graphs[1:]:
        if g.node_count != n:
            raise NodeCountMismatch(
                f"node counts differ: {n} vs {g.node_count}"
            )
    if len(graphs) == 1:
        return graphs[0]
    stacked = np.vstack([g.edge_array for g in graphs])
    return Graph(n, stacked)


def _bfs_dense(adj: np.ndarray) -> np.ndarray:
    # level-synchronous BFS from every source at once; the float32 matmul
    # counts frontier predecessors, only its support matters
    n = adj.shape[0]
    dist = np.where(adj, 1.0, UNREACHABLE)
    np.fill_diagonal(dist, 0.0)
    reach = adj | np.eye(n, dtype=bool)
    frontier = adj.astype(np.float32)
    a_f = adj.astype(np.float32)
    d = 1
    while True:
        nxt = (frontier @ a_f) > 0
        new = nxt & ~reach
        if not new.any():
            return dist
        d += 1
        dist[new] = d
        reach |= new
        frontier = new.astype(np.float32)


def _bfs_sparse(g: Graph) -> np.ndarray:
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import shortest_path

    e = g.edge_array
    data = np.ones(e.shape[0])
    mat = csr_matrix((data, (e[:, 0], e[:, 1])), shape=(g.node_count, g.node_count))
    return shortest_path(mat, method="D", directed=False, unweighted=True)


def all_pairs_distances(g: Graph) -> np.ndarray:
    """All-pairs shortest-path hop counts by breadth-first search.

    Returns
    -------
    np.ndarray
        (n, n) float matrix; ``dist[i, j]`` is the minimum hop count,
        ``inf`` when no path exists, 0 on the diagonal.
    """
    if g.node_count == 0:
        return np.zeros((0, 0))
    if g.node_count <= _DENSE_BFS_LIMIT:
        dist = _bfs_dense(g.adjacency)
    else:
        dist = _bfs_sparse(g)
    dist.setflags(write=False)
    return dist


def efficiency_matrix(dist: np.ndarray) -> np.ndarray:
    """Pairwise efficiency ``1 / dist`` with unreachable pairs mapped to 0."""
    eff = np.zeros_like(dist, dtype=float)
    mask = np.isfinite(dist) & (dist > 0)
    eff[mask] = 1.0 / dist[mask]
    return eff


def pair_efficiencies(dist: np.ndarray) -> np.ndarray:
    """Efficiency over the canonical unordered-pair vector (i < j)."""
    iu, ju = np.triu_indices(dist.shape[0], k=1)
    d = dist[iu, ju]
    eff = np.zeros_like(d)
    mask = np.isfinite(d)
    eff[mask] = 1.0 / d[mask]
    return eff


def global_efficiency(g: Graph) -> float:
    """Mean pair efficiency over distinct unordered pairs.

    Disconnected pairs contribute 0. Requires at least two nodes.
    """
    if g.node_count < 2:
        raise TooFewNodes("global efficiency needs >= 2 nodes")
    return float(pair_efficiencies(g.distances).mean())


def delta_efficiency(e1: Graph, e2: Graph) -> float:
    """Efficiency gained by adding ``e1``'s edges on top of ``e2``.

    ``F(e1 | e2) = F(e1 union e2) - F(e2)``; non-negative, since extra
    edges can only shorten shortest paths.
    """
    if e1.node_count != e2.node_count:
        raise NodeCountMismatch(
            f"node counts differ: {e1.node_count} vs {e2.node_count}"
        )
    return global_efficiency(union_graphs([e1, e2])) - global_efficiency(e2)


def clustering_coefficient(g: Graph) -> float:
    """Mean local clustering coefficient.

    Per node: closed triangles over connected neighbour pairs; nodes of
    degree < 2 contribute 0.
    """
    if g.node_count < 3:
        raise TooFewNodes("clustering needs >= 3 nodes")
    a = g.adjacency.astype(np.float64)
    deg = g.degrees.astype(np.float64)
    triangles = np.einsum("ij,jk,ki->i", a, a, a) / 2.0
    denom = deg * (deg - 1) / 2.0
    local = np.divide(triangles, denom, out=np.zeros_like(denom), where=denom > 0)
    return float(local.mean())


def characteristic_path_length(g: Graph) -> float:
    """Mean shortest-path length over reachable distinct pairs."""
    if g.node_count < 2:
        raise TooFewNodes("path length needs >= 2 nodes")
    iu, ju = np.triu_indices(g.node_count, k=1)
    d = g.distances[iu, ju]
    finite = np.isfinite(d)
    if not finite.any():
        raise NoReachablePairs("graph has no connected pair of nodes")
    return float(d[finite].mean())


def largest_component_subgraph(g: Graph) -> tuple[Graph, np.ndarray]:
    """Induced subgraph on the largest connected component.

    Returns the subgraph and the original node indices it keeps, using the
    reachability structure of the BFS distance matrix.
    """
    if g.node_count == 0:
        return g, np.arange(0)
    reach = np.isfinite(g.distances)
    sizes = reach.sum(axis=1)
    seed = int(sizes.argmax())
    keep = np.flatnonzero(reach[seed])
    if keep.size == g.node_count:
        return g, keep
    remap = -np.ones(g.node_count, dtype=np.int64)
    remap[keep] = np.arange(keep.size)
    e = g.edge_array
    mask = np.isin(e[:, 0], keep) & np.isin(e[:, 1], keep)
    sub_edges = remap[e[mask]]
    return Graph(keep.size, sub_edges), keep
