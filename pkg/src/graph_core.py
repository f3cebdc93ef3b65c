# graph_core.py
# BDDKERN - Immutable simple graphs with stable vertex labels

import logging
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

logger = logging.getLogger(__name__)

VertexSet = FrozenSet[int]
DegreeBound = int
Edge = Tuple[int, int]


class BDDKernelError(Exception):
    """Root of every error raised by the toolkit"""
    pass


class GraphError(BDDKernelError):
    """Custom exception for malformed graphs"""
    pass


class SelfLoopError(GraphError):
    def __init__(self, vertex: int):
        self.vertex = vertex
        super().__init__(f"Self-loop on vertex {vertex}")


class DuplicateEdgeError(GraphError):
    def __init__(self, u: int, v: int):
        self.edge = (u, v)
        super().__init__(f"Duplicate edge ({u}, {v})")


class VertexOutOfRangeError(GraphError):
    def __init__(self, vertex: int, n: int):
        self.vertex = vertex
        self.n = n
        super().__init__(f"Vertex {vertex} outside [0, {n})")


class InvalidDegreeBoundError(GraphError):
    pass


def check_degree_bound(d: DegreeBound) -> DegreeBound:
    """Validate a degree bound d >= 0 and return it as a plain int"""
    if isinstance(d, bool) or not isinstance(d, (int, np.integer)) or d < 0:
        raise InvalidDegreeBoundError(f"Degree bound must be a nonnegative integer, got {d!r}")
    return int(d)


class Graph:
    """
    Immutable simple undirected graph on dense vertices 0..n-1.

    Each vertex carries an original label that survives induced-subgraph
    extraction, so results computed on renumbered subgraphs can always be
    reported in the caller's identifiers. Adjacency lists are sorted and
    every iteration order in the package derives from them.
    """

    __slots__ = ('_n', '_edges', '_adjacency', '_labels', '_label_index')

    def __init__(
        self,
        n: int,
        edges: np.ndarray,
        adjacency: Tuple[Tuple[int, ...], ...],
        labels: Tuple[int, ...]
    ):
        # Use new_graph(); this constructor trusts canonical input
        self._n = n
        self._edges = edges
        self._adjacency = adjacency
        self._labels = labels
        self._label_index = {label: v for v, label in enumerate(labels)}

    @property
    def n(self) -> int:
        return self._n

    @property
    def m(self) -> int:
        return int(self._edges.shape[0])

    @property
    def labels(self) -> Tuple[int, ...]:
        return self._labels

    def label(self, v: int) -> int:
        return self._labels[v]

    def index_of(self, label: int) -> int:
        """Vertex index carrying the given original label"""
        try:
            return self._label_index[label]
        except KeyError:
            raise VertexOutOfRangeError(label, self._n) from None

    def vertices(self) -> range:
        return range(self._n)

    def edges(self) -> List[Edge]:
        """Edges as (u, v) with u < v in lexicographic order"""
        return [(int(u), int(v)) for u, v in self._edges]

    def edge_array(self) -> np.ndarray:
        return self._edges

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self._adjacency[v]

    def degree(self, v: int) -> int:
        return len(self._adjacency[v])

    def degrees(self) -> List[int]:
        return [len(nbrs) for nbrs in self._adjacency]

    def max_degree(self) -> int:
        return max((len(nbrs) for nbrs in self._adjacency), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self._adjacency[u]
        lo, hi = 0, len(nbrs)
        while lo < hi:
            mid = (lo + hi) // 2
            if nbrs[mid] < v:
                lo = mid + 1
            else:
                hi = mid
        return lo < len(nbrs) and nbrs[lo] == v

    def residual_degree(self, v: int, removed: Iterable[int]) -> int:
        """Degree of v once the vertices in `removed` are deleted"""
        gone = removed if isinstance(removed, (set, frozenset)) else set(removed)
        return sum(1 for u in self._adjacency[v] if u not in gone)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self._n == other._n
            and self._labels == other._labels
            and self._adjacency == other._adjacency
        )

    def __hash__(self) -> int:
        return hash((self._n, self._labels, self._adjacency))

    def __repr__(self) -> str:
        return f"Graph(n={self._n}, m={self.m})"


def _canonical_graph(n: int, lo: np.ndarray, hi: np.ndarray, labels: Tuple[int, ...]) -> Graph:
    """Build a Graph from validated endpoint arrays with lo < hi"""
    keys = lo * max(n, 1) + hi
    order = np.argsort(keys, kind='stable')
    edges = np.stack([lo[order], hi[order]], axis=1) if lo.size else np.empty((0, 2), dtype=np.int64)

    # CSR over both directions, neighbours ascending within each row
    src = np.concatenate([lo, hi])
    dst = np.concatenate([hi, lo])
    by_row = np.lexsort((dst, src))
    dst_sorted = dst[by_row].tolist()
    indptr = np.concatenate([[0], np.cumsum(np.bincount(src, minlength=n))]).tolist()
    adjacency = tuple(tuple(dst_sorted[indptr[v]:indptr[v + 1]]) for v in range(n))
    return Graph(n, edges, adjacency, labels)


def new_graph(n: int, edge_list: Iterable[Sequence[int]], labels: Optional[Sequence[int]] = None) -> Graph:
    """
    Create a simple graph from an edge list.

    Args:
        n: Number of vertices
        edge_list: Pairs of endpoints in [0, n)
        labels: Optional original identifiers, pairwise distinct (default 0..n-1)

    Returns:
        Canonical Graph

    Raises:
        SelfLoopError, DuplicateEdgeError, VertexOutOfRangeError
    """
    if n < 0:
        raise GraphError(f"Vertex count must be nonnegative, got {n}")
    pairs = list(edge_list)
    arr = np.asarray(pairs, dtype=np.int64).reshape(-1, 2) if pairs else np.empty((0, 2), dtype=np.int64)

    if arr.size:
        bad = np.flatnonzero((arr < 0) | (arr >= n))
        if bad.size:
            raise VertexOutOfRangeError(int(arr.reshape(-1)[bad[0]]), n)
        loops = np.flatnonzero(arr[:, 0] == arr[:, 1])
        if loops.size:
            raise SelfLoopError(int(arr[loops[0], 0]))

    lo = np.minimum(arr[:, 0], arr[:, 1])
    hi = np.maximum(arr[:, 0], arr[:, 1])
    keys = lo * max(n, 1) + hi
    order = np.argsort(keys, kind='stable')
    repeated = np.flatnonzero(keys[order][1:] == keys[order][:-1])
    if repeated.size:
        first = int(order[repeated.min() + 1])
        raise DuplicateEdgeError(int(arr[first, 0]), int(arr[first, 1]))

    if labels is None:
        label_tuple = tuple(range(n))
    else:
        label_tuple = tuple(int(label) for label in labels)
        if len(label_tuple) != n:
            raise GraphError(f"Expected {n} labels, got {len(label_tuple)}")
        if len(set(label_tuple)) != n:
            raise GraphError("Vertex labels must be pairwise distinct")

    graph = _canonical_graph(n, lo, hi, label_tuple)
    logger.debug(f"Built graph with {graph.n} vertices and {graph.m} edges")
    return graph


def vertex_set(g: Graph, members: Iterable[int]) -> VertexSet:
    """Validate vertex indices against g and freeze them"""
    result = frozenset(int(v) for v in members)
    for v in result:
        if not 0 <= v < g.n:
            raise VertexOutOfRangeError(v, g.n)
    return result


def induced_subgraph(g: Graph, s: Iterable[int]) -> Graph:
    """
    Extract G[s]. Vertices are renumbered in ascending order of their
    index in g and keep their labels.
    """
    members = sorted(vertex_set(g, s))
    keep = np.zeros(g.n, dtype=bool)
    keep[members] = True
    remap = np.full(g.n, -1, dtype=np.int64)
    remap[members] = np.arange(len(members), dtype=np.int64)

    edges = g.edge_array()
    if edges.size:
        mask = keep[edges[:, 0]] & keep[edges[:, 1]]
        lo = remap[edges[mask, 0]]
        hi = remap[edges[mask, 1]]
    else:
        lo = hi = np.empty(0, dtype=np.int64)
    labels = tuple(g.label(v) for v in members)
    return _canonical_graph(len(members), lo, hi, labels)


def open_neighborhood(g: Graph, s: Iterable[int]) -> VertexSet:
    """N(s): vertices outside s adjacent to some vertex of s"""
    members = vertex_set(g, s)
    found = set()
    for v in members:
        found.update(g.neighbors(v))
    return frozenset(found - members)


def closed_neighborhood(g: Graph, s: Iterable[int]) -> VertexSet:
    """N[s] = N(s) ∪ s"""
    members = vertex_set(g, s)
    return open_neighborhood(g, members) | members


def to_networkx(g: Graph) -> nx.Graph:
    """Convert to a networkx graph; original labels kept as node attribute 'label'"""
    nxg = nx.Graph()
    nxg.add_nodes_from((v, {'label': g.label(v)}) for v in g.vertices())
    nxg.add_edges_from(g.edges())
    return nxg
