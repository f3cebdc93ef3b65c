# matching.py
# BDDKERN - Bipartite graph H, auxiliary copy graph H', matchings and alternating paths

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Dict, FrozenSet, Iterable, List, Mapping, Optional, Protocol, Sequence, Tuple

from src.graph_core import (
    BDDKernelError,
    DegreeBound,
    Graph,
    VertexSet,
    check_degree_bound,
    vertex_set,
)

logger = logging.getLogger(__name__)

HOPCROFT_KARP = 'hopcroft_karp'
AUGMENTING_PATH = 'augmenting_path'
MATCHING_ALGORITHMS = (HOPCROFT_KARP, AUGMENTING_PATH)


class MatchingError(BDDKernelError):
    """Custom exception for matching-related errors"""
    pass


class OverlappingSidesError(MatchingError):
    def __init__(self, shared: Iterable[int]):
        self.shared = sorted(shared)
        super().__init__(f"Bipartite sides overlap on vertices {self.shared}")


class NotAMatchingOfAuxiliaryError(MatchingError):
    pass


class UntaggedVertexIsMatchedError(MatchingError):
    def __init__(self, vertex: int):
        self.vertex = vertex
        super().__init__(f"Untagged vertex {vertex} is covered by a marked edge")


class BipartiteStructure(Protocol):
    """Anything maximum_matching can run on: ordered left side plus left adjacency"""

    @property
    def left_vertices(self) -> Sequence[int]: ...

    def left_neighbors(self, u: int) -> Sequence[int]: ...


@dataclass(frozen=True)
class BipartiteGraph:
    """The bipartite graph H between X (left) and Y (right) of a host graph"""
    left: Tuple[int, ...]
    right: Tuple[int, ...]
    adjacency: Mapping[int, Tuple[int, ...]] = field(repr=False)
    right_adjacency: Mapping[int, Tuple[int, ...]] = field(repr=False)

    @property
    def left_vertices(self) -> Sequence[int]:
        return self.left

    def left_neighbors(self, u: int) -> Sequence[int]:
        return self.adjacency[u]

    def right_neighbors(self, y: int) -> Sequence[int]:
        return self.right_adjacency.get(y, ())

    @property
    def cross_edges(self) -> FrozenSet[Tuple[int, int]]:
        return frozenset((x, y) for x in self.left for y in self.adjacency[x])

    def degree_of_right(self, y: int) -> int:
        return len(self.right_adjacency.get(y, ()))


@dataclass(frozen=True)
class AuxiliaryGraph:
    """
    H' with d+1 copies X_1..X_{d+1} of the left side of H.

    Copy vertex x_i is encoded as position(x) * (d+1) + (i-1), so the
    left side is dense and ordered by X-vertex first, copy index second.
    """
    source: BipartiteGraph
    copies: int
    _position: Mapping[int, int] = field(repr=False, compare=False)

    @property
    def left_vertices(self) -> Sequence[int]:
        return range(len(self.source.left) * self.copies)

    @property
    def right(self) -> Tuple[int, ...]:
        return self.source.right

    def left_neighbors(self, u: int) -> Sequence[int]:
        return self.source.adjacency[self.source.left[u // self.copies]]

    def copy_vertex(self, x: int, i: int) -> int:
        """Encoded id of x_i, copy index i in [1, d+1]"""
        if not 1 <= i <= self.copies:
            raise MatchingError(f"Copy index {i} outside [1, {self.copies}]")
        return self._position[x] * self.copies + (i - 1)

    def original(self, u: int) -> Tuple[int, int]:
        """Decode a copy vertex into (x, copy index)"""
        return self.source.left[u // self.copies], u % self.copies + 1

    def right_degree(self, y: int) -> int:
        return self.copies * self.source.degree_of_right(y)

    def has_edge(self, u: int, y: int) -> bool:
        return 0 <= u < len(self.source.left) * self.copies and y in self.left_neighbors(u)


@dataclass(frozen=True)
class Matching:
    """Vertex-disjoint (left, right) pairs, sorted by left vertex"""
    pairs: Tuple[Tuple[int, int], ...]

    @property
    def size(self) -> int:
        return len(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def mate_of_right(self) -> Dict[int, int]:
        return {v: u for u, v in self.pairs}


@dataclass(frozen=True)
class MarkedEdgeSet:
    """Marked edges of H; grouped by X-vertex they form a <=(d+1)-star packing"""
    marked: FrozenSet[Tuple[int, int]]
    leaves: Mapping[int, Tuple[int, ...]] = field(repr=False)
    center_of: Mapping[int, int] = field(repr=False)

    def marked_degree(self, x: int) -> int:
        return len(self.leaves.get(x, ()))

    def is_marked(self, x: int, y: int) -> bool:
        return self.center_of.get(y) == x

    def __len__(self) -> int:
        return len(self.marked)


def build_bipartite(g: Graph, x: Iterable[int], y: Iterable[int]) -> BipartiteGraph:
    """
    Build H = (X, Y, E_H) keeping only the edges of g between x and y.

    Raises:
        OverlappingSidesError: If x and y share a vertex
    """
    left_set = vertex_set(g, x)
    right_set = vertex_set(g, y)
    shared = left_set & right_set
    if shared:
        raise OverlappingSidesError(shared)

    left = tuple(sorted(left_set))
    right = tuple(sorted(right_set))
    adjacency = {u: tuple(v for v in g.neighbors(u) if v in right_set) for u in left}

    right_lists: Dict[int, List[int]] = {}
    for u in left:
        for v in adjacency[u]:
            right_lists.setdefault(v, []).append(u)
    # left is ascending, so each right list is already sorted
    right_adjacency = {v: tuple(us) for v, us in right_lists.items()}
    return BipartiteGraph(left, right, adjacency, right_adjacency)


def build_auxiliary(h: BipartiteGraph, d: DegreeBound) -> AuxiliaryGraph:
    """Build H' with d+1 copies of the left side of h"""
    d = check_degree_bound(d)
    position = {x: i for i, x in enumerate(h.left)}
    return AuxiliaryGraph(h, d + 1, position)


def _hopcroft_karp(b: BipartiteStructure) -> Dict[int, int]:
    """
    Iterative Hopcroft-Karp. Free left vertices, adjacency lists and the
    per-vertex scan pointers all advance in ascending order, so the result
    depends only on the input.
    """
    left = list(b.left_vertices)
    pair_left: Dict[int, int] = {}
    pair_right: Dict[int, int] = {}
    phases = 0

    while True:
        # BFS: layer the graph from all free left vertices
        dist: Dict[int, int] = {}
        queue: Deque[int] = deque()
        for u in left:
            if u not in pair_left:
                dist[u] = 0
                queue.append(u)
        limit: Optional[int] = None
        while queue:
            u = queue.popleft()
            if limit is not None and dist[u] >= limit:
                continue
            for v in b.left_neighbors(u):
                w = pair_right.get(v)
                if w is None:
                    if limit is None:
                        limit = dist[u] + 1
                elif w not in dist:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        if limit is None:
            break
        phases += 1

        # DFS: vertex-disjoint shortest augmenting paths
        pointer: Dict[int, int] = {}
        for root in left:
            if root in pair_left:
                continue
            path = [root]
            via: List[int] = []
            while path:
                u = path[-1]
                nbrs = b.left_neighbors(u)
                k = pointer.get(u, 0)
                step = None
                augmenting = False
                while k < len(nbrs):
                    v = nbrs[k]
                    k += 1
                    w = pair_right.get(v)
                    if w is None:
                        if dist[u] + 1 == limit:
                            step = v
                            augmenting = True
                            break
                    elif dist.get(w, -1) == dist[u] + 1:
                        step = v
                        break
                pointer[u] = k
                if augmenting:
                    via.append(step)
                    for left_u, right_v in zip(path, via):
                        pair_left[left_u] = right_v
                        pair_right[right_v] = left_u
                    break
                if step is not None:
                    via.append(step)
                    path.append(pair_right[step])
                    continue
                # dead end: drop u from the layered graph
                dist[u] = -1
                path.pop()
                if via:
                    via.pop()

    logger.debug(f"Hopcroft-Karp finished after {phases} phases with {len(pair_left)} pairs")
    return pair_left


def _augmenting_path(b: BipartiteStructure) -> Dict[int, int]:
    """Simple augmenting-path search, one free left vertex at a time"""
    pair_left: Dict[int, int] = {}
    pair_right: Dict[int, int] = {}

    for root in b.left_vertices:
        visited = set()
        path = [root]
        via: List[int] = []
        pointer: Dict[int, int] = {}
        while path:
            u = path[-1]
            nbrs = b.left_neighbors(u)
            k = pointer.get(u, 0)
            step = None
            free = False
            while k < len(nbrs):
                v = nbrs[k]
                k += 1
                if v in visited:
                    continue
                visited.add(v)
                step = v
                free = v not in pair_right
                break
            pointer[u] = k
            if step is None:
                path.pop()
                if via:
                    via.pop()
                continue
            via.append(step)
            if free:
                for left_u, right_v in zip(path, via):
                    pair_left[left_u] = right_v
                    pair_right[right_v] = left_u
                break
            path.append(pair_right[step])
    return pair_left


def maximum_matching(b: BipartiteStructure, algorithm: str = HOPCROFT_KARP) -> Matching:
    """
    Compute a maximum-cardinality matching of a bipartite structure.

    Args:
        b: BipartiteGraph or AuxiliaryGraph
        algorithm: 'hopcroft_karp' (default) or 'augmenting_path'

    Returns:
        Matching with pairs sorted by left vertex
    """
    if algorithm == HOPCROFT_KARP:
        pair_left = _hopcroft_karp(b)
    elif algorithm == AUGMENTING_PATH:
        pair_left = _augmenting_path(b)
    else:
        raise MatchingError(f"Unknown matching algorithm '{algorithm}'. Expected one of {MATCHING_ALGORITHMS}")
    return Matching(tuple(sorted(pair_left.items())))


def project_matching(h: BipartiteGraph, m_prime: Matching, d: DegreeBound) -> MarkedEdgeSet:
    """
    Collapse a matching of H' = build_auxiliary(h, d) onto H: (x_i, y) marks (x, y).

    Raises:
        NotAMatchingOfAuxiliaryError: If a pair is not an edge of H' or pairs share a vertex
    """
    aux = build_auxiliary(h, d)
    seen_left = set()
    seen_right = set()
    leaves: Dict[int, List[int]] = {}
    center_of: Dict[int, int] = {}

    for u, y in m_prime.pairs:
        if not aux.has_edge(u, y):
            raise NotAMatchingOfAuxiliaryError(f"Pair ({u}, {y}) is not an edge of the auxiliary graph")
        if u in seen_left or y in seen_right:
            raise NotAMatchingOfAuxiliaryError(f"Pair ({u}, {y}) reuses a matched vertex")
        seen_left.add(u)
        seen_right.add(y)
        x, _ = aux.original(u)
        leaves.setdefault(x, []).append(y)
        center_of[y] = x

    marked = frozenset((x, y) for y, x in center_of.items())
    frozen_leaves = {x: tuple(sorted(ys)) for x, ys in leaves.items()}
    return MarkedEdgeSet(marked, frozen_leaves, center_of)


def alternating_reachable(h: BipartiteGraph, m: MarkedEdgeSet, untagged: Iterable[int]) -> VertexSet:
    """
    X-vertices reachable from an untagged Y-vertex by an M-alternating path.

    Breadth-first search from all untagged vertices at once: Y -> X along
    unmarked edges, X -> Y along marked edges.

    Raises:
        UntaggedVertexIsMatchedError: If a start vertex is covered by m
    """
    right_set = set(h.right)
    sources = sorted(set(untagged))
    for y in sources:
        if y not in right_set:
            raise MatchingError(f"Untagged vertex {y} is not on the Y side")
        if y in m.center_of:
            raise UntaggedVertexIsMatchedError(y)
    if not sources:
        return frozenset()

    reached_x = set()
    reached_y = set(sources)
    queue: Deque[int] = deque(sources)
    while queue:
        y = queue.popleft()
        own_center = m.center_of.get(y)
        for x in h.right_neighbors(y):
            if x == own_center or x in reached_x:
                continue
            reached_x.add(x)
            for leaf in m.leaves.get(x, ()):
                if leaf not in reached_y:
                    reached_y.add(leaf)
                    queue.append(leaf)
    return frozenset(reached_x)
