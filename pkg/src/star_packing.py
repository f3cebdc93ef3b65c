# star_packing.py
# BDDKERN - Maximal (d+1)-star packings and tag classification

import heapq
import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

from src.graph_core import (
    BDDKernelError,
    DegreeBound,
    Graph,
    VertexSet,
    check_degree_bound,
    vertex_set,
)
from src.matching import (
    HOPCROFT_KARP,
    BipartiteGraph,
    MarkedEdgeSet,
    build_auxiliary,
    build_bipartite,
    maximum_matching,
    project_matching,
)

logger = logging.getLogger(__name__)

LOWEST_INDEX = 'lowest_index'
MAX_DEGREE_FIRST = 'max_degree_first'
PACKING_POLICIES = (LOWEST_INDEX, MAX_DEGREE_FIRST)


class StarPackingError(BDDKernelError):
    """Custom exception for invalid stars and packings"""
    pass


@dataclass(frozen=True)
class Star:
    center: int
    leaves: Tuple[int, ...]

    def __post_init__(self):
        if not self.leaves:
            raise StarPackingError(f"Star centered at {self.center} has no leaves")
        if self.center in self.leaves:
            raise StarPackingError(f"Star center {self.center} is also one of its leaves")
        if len(set(self.leaves)) != len(self.leaves):
            raise StarPackingError(f"Star centered at {self.center} repeats a leaf")

    @property
    def vertices(self) -> Tuple[int, ...]:
        return (self.center,) + self.leaves

    def __len__(self) -> int:
        return len(self.leaves)


@dataclass(frozen=True)
class StarPacking:
    """Vertex-disjoint stars"""
    stars: Tuple[Star, ...] = ()

    def __post_init__(self):
        seen = set()
        for star in self.stars:
            for v in star.vertices:
                if v in seen:
                    raise StarPackingError(f"Vertex {v} appears in two stars")
                seen.add(v)

    @property
    def covered(self) -> VertexSet:
        return frozenset(v for star in self.stars for v in star.vertices)

    @property
    def centers(self) -> VertexSet:
        return frozenset(star.center for star in self.stars)

    def __len__(self) -> int:
        return len(self.stars)

    def __iter__(self):
        return iter(self.stars)

    def verify(self, g: Graph) -> None:
        """Raise StarPackingError unless every center-leaf pair is an edge of g"""
        for star in self.stars:
            vertex_set(g, star.vertices)
            for leaf in star.leaves:
                if not g.has_edge(star.center, leaf):
                    raise StarPackingError(f"({star.center}, {leaf}) is not an edge")


@dataclass(frozen=True)
class TagClassification:
    fully_tagged: VertexSet
    untagged: VertexSet


def _star_from(center: int, leaves: Iterable[int]) -> Star:
    return Star(center, tuple(sorted(leaves)))


def maximal_star_packing(
    g: Graph,
    d: DegreeBound,
    seed: Optional[StarPacking] = None,
    policy: str = LOWEST_INDEX
) -> StarPacking:
    """
    Greedily pack (d+1)-stars until every uncovered vertex has at most d
    uncovered neighbours.

    Args:
        g: Host graph
        d: Degree bound
        seed: Optional packing of (d+1)-stars to extend
        policy: 'lowest_index' scans centers in ascending order;
                'max_degree_first' takes the highest residual degree first

    Returns:
        Maximal (d+1)-star packing; V(packing) is a d-degree deletion set
    """
    d = check_degree_bound(d)
    if policy not in PACKING_POLICIES:
        raise StarPackingError(f"Unknown packing policy '{policy}'. Expected one of {PACKING_POLICIES}")

    covered = [False] * g.n
    stars: List[Star] = []
    if seed is not None:
        for star in seed:
            if len(star) != d + 1:
                raise StarPackingError(f"Seed star at {star.center} has {len(star)} leaves, expected {d + 1}")
            stars.append(star)
            for v in star.vertices:
                covered[v] = True

    residual = [0] * g.n
    for v in g.vertices():
        if not covered[v]:
            residual[v] = sum(1 for u in g.neighbors(v) if not covered[u])

    def take(center: int) -> List[int]:
        leaves = []
        for u in g.neighbors(center):
            if not covered[u]:
                leaves.append(u)
                if len(leaves) == d + 1:
                    break
        stars.append(_star_from(center, leaves))
        for v in [center] + leaves:
            covered[v] = True
            for u in g.neighbors(v):
                residual[u] -= 1
        return leaves

    if policy == LOWEST_INDEX:
        changed = True
        while changed:
            changed = False
            for v in g.vertices():
                if not covered[v] and residual[v] >= d + 1:
                    take(v)
                    changed = True
    else:
        heap = [(-residual[v], v) for v in g.vertices() if not covered[v] and residual[v] >= d + 1]
        heapq.heapify(heap)
        while heap:
            neg, v = heapq.heappop(heap)
            if covered[v] or residual[v] < d + 1:
                continue
            if -neg != residual[v]:
                # stale entry
                heapq.heappush(heap, (-residual[v], v))
                continue
            take(v)

    packing = StarPacking(tuple(stars))
    logger.debug(f"Maximal {d + 1}-star packing ({policy}): {len(packing)} stars, {len(packing.covered)} vertices")
    return packing


def packing_from_marked(marked: MarkedEdgeSet, centers: Optional[Iterable[int]] = None) -> StarPacking:
    """Stars formed by the marked edges, optionally restricted to the given centers"""
    chosen = sorted(marked.leaves) if centers is None else sorted(set(centers))
    return StarPacking(tuple(Star(x, marked.leaves[x]) for x in chosen if marked.leaves.get(x)))


def classify(h: BipartiteGraph, projected: MarkedEdgeSet, d: DegreeBound) -> TagClassification:
    """Split H into fully tagged X-vertices and untagged Y-vertices"""
    d = check_degree_bound(d)
    fully_tagged = frozenset(x for x, leaves in projected.leaves.items() if len(leaves) == d + 1)
    untagged = frozenset(
        y for y in h.right
        if h.degree_of_right(y) > 0 and y not in projected.center_of
    )
    return TagClassification(fully_tagged, untagged)


def find_full_star_packing(
    g: Graph,
    c: Iterable[int],
    i: Iterable[int],
    d: DegreeBound,
    algorithm: str = HOPCROFT_KARP
) -> Optional[StarPacking]:
    """
    A full (d+1)-star packing from c to i, or None if none exists.
    Decided by a maximum matching of the (d+1)-copy auxiliary graph.
    """
    d = check_degree_bound(d)
    centers = vertex_set(g, c)
    if not centers:
        return StarPacking()
    h = build_bipartite(g, centers, i)
    matching = maximum_matching(build_auxiliary(h, d), algorithm)
    if matching.size != (d + 1) * len(centers):
        return None
    return packing_from_marked(project_matching(h, matching, d))


def full_star_packing_exists(
    g: Graph,
    c: Iterable[int],
    i: Iterable[int],
    d: DegreeBound
) -> bool:
    return find_full_star_packing(g, c, i, d) is not None
