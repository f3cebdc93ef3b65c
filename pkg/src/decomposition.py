# decomposition.py
# BDDKERN - d-bounded decompositions: basic, the repair loop, decompose and the validator

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

from src.graph_core import (
    BDDKernelError,
    DegreeBound,
    Graph,
    VertexSet,
    check_degree_bound,
    open_neighborhood,
    vertex_set,
)
from src.matching import (
    HOPCROFT_KARP,
    MATCHING_ALGORITHMS,
    BipartiteGraph,
    MarkedEdgeSet,
    alternating_reachable,
    build_auxiliary,
    build_bipartite,
    maximum_matching,
    project_matching,
)
from src.star_packing import (
    LOWEST_INDEX,
    PACKING_POLICIES,
    StarPacking,
    StarPackingError,
    TagClassification,
    classify,
    find_full_star_packing,
    maximal_star_packing,
    packing_from_marked,
)

logger = logging.getLogger(__name__)


class DecompositionError(BDDKernelError):
    """Custom exception for decomposition errors and violated termination monitors"""
    pass


class PartitionInvalidError(DecompositionError):
    pass


class DegreeBoundViolatedInYError(DecompositionError):
    def __init__(self, vertex: int, degree: int, d: int):
        self.vertex = vertex
        self.degree = degree
        super().__init__(f"Vertex {vertex} has degree {degree} > {d} inside Y")


@dataclass
class DecompositionConfig:
    """Configuration for decompose and everything built on it"""
    packing_policy: str = LOWEST_INDEX
    matching_algorithm: str = HOPCROFT_KARP
    check_invariants: bool = True

    def __post_init__(self):
        if self.packing_policy not in PACKING_POLICIES:
            raise DecompositionError(f"Unknown packing policy '{self.packing_policy}'")
        if self.matching_algorithm not in MATCHING_ALGORITHMS:
            raise DecompositionError(f"Unknown matching algorithm '{self.matching_algorithm}'")


@dataclass(frozen=True)
class BasicResult:
    """(C', I') satisfying the Basic Condition, with the data that produced it"""
    c_prime: VertexSet
    i_prime: VertexSet
    witness_packing: StarPacking
    marked: Optional[MarkedEdgeSet] = field(default=None, repr=False, compare=False)
    tags: Optional[TagClassification] = field(default=None, repr=False, compare=False)


@dataclass(frozen=True)
class RepairState:
    c_prime: VertexSet
    i_prime: VertexSet
    t_prime: VertexSet
    iteration: int = 0
    bad_frontier: VertexSet = frozenset()

    @classmethod
    def of(cls, g: Graph, c_prime: Iterable[int], i_prime: Iterable[int], iteration: int = 0) -> 'RepairState':
        """State with T' = N(I') \\ C' computed against the full graph"""
        c = vertex_set(g, c_prime)
        i = vertex_set(g, i_prime)
        return cls(c, i, open_neighborhood(g, i) - c, iteration)


@dataclass
class DecompositionStats:
    packing_policy: str = LOWEST_INDEX
    matching_algorithm: str = HOPCROFT_KARP
    packing_upgrades: int = 0
    repair_iterations: int = 0
    phase1_stars: int = 0
    deletion_set_size: int = 0
    c_history: List[int] = field(default_factory=list)


@dataclass(frozen=True)
class DBoundedDecomposition:
    i: VertexSet
    c: VertexSet
    t: VertexSet
    j: VertexSet
    witness_packing: StarPacking = StarPacking()
    stats: DecompositionStats = field(default_factory=DecompositionStats, compare=False)


@dataclass
class DecompositionReport:
    """Per-condition verdicts of validate_decomposition"""
    partition: bool
    condition1: bool
    condition2: bool
    condition3: bool
    witness: Optional[bool] = None
    crown: Optional[bool] = None
    violations: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.partition and self.condition1 and self.condition2 and self.condition3

    def verdicts(self) -> Dict[str, Optional[bool]]:
        return {
            'partition': self.partition,
            'condition1_degree': self.condition1,
            'condition2_no_i_j_edges': self.condition2,
            'condition3_star_packing': self.condition3,
            'witness_packing': self.witness,
            'crown': self.crown,
        }


def _settle(h: BipartiteGraph, marked: MarkedEdgeSet, d: int, check: bool = True) -> BasicResult:
    """Derive C' and I' from the marked edges of H"""
    tags = classify(h, marked, d)
    if tags.untagged:
        c_prime = alternating_reachable(h, marked, tags.untagged)
    else:
        c_prime = frozenset()

    if check:
        for x in c_prime:
            if marked.marked_degree(x) != d + 1:
                raise DecompositionError(f"Reachable vertex {x} is not fully tagged")

    x_rest = set(h.left) - c_prime
    y_prime = {leaf for x in x_rest for leaf in marked.leaves.get(x, ())}
    i_prime = frozenset(h.right) - y_prime
    witness = packing_from_marked(marked, c_prime)
    return BasicResult(c_prime, i_prime, witness, marked, tags)


def _match_and_settle(
    g: Graph,
    x: VertexSet,
    y: VertexSet,
    d: int,
    algorithm: str = HOPCROFT_KARP,
    check: bool = True
) -> BasicResult:
    """basic() without the partition checks; x and y may be any disjoint sets of g"""
    h = build_bipartite(g, x, y)
    matching = maximum_matching(build_auxiliary(h, d), algorithm)
    marked = project_matching(h, matching, d)
    return _settle(h, marked, d, check)


def basic(
    g: Graph,
    x: Iterable[int],
    y: Iterable[int],
    d: DegreeBound,
    algorithm: str = HOPCROFT_KARP
) -> BasicResult:
    """
    Find C' ⊆ X and I' ⊆ Y satisfying the Basic Condition.

    Args:
        g: Host graph
        x, y: Partition of g's vertices with max degree of g[y] at most d
        d: Degree bound

    Raises:
        PartitionInvalidError: If x and y do not partition V(g)
        DegreeBoundViolatedInYError: If some vertex has more than d neighbours in y
    """
    d = check_degree_bound(d)
    x_set = vertex_set(g, x)
    y_set = vertex_set(g, y)
    if x_set & y_set or len(x_set) + len(y_set) != g.n:
        raise PartitionInvalidError("X and Y must partition the vertex set")
    for v in sorted(y_set):
        inside = sum(1 for u in g.neighbors(v) if u in y_set)
        if inside > d:
            raise DegreeBoundViolatedInYError(v, inside, d)
    return _match_and_settle(g, x_set, y_set, d, algorithm)


def bad_vertices(g: Graph, state: RepairState, d: DegreeBound) -> VertexSet:
    """
    N_{I'}(B) where B holds the T'-vertices of degree > d in G* = G[V \\ C'].
    Degrees are taken in the full residual graph G*.
    """
    d = check_degree_bound(d)
    heavy = {t for t in state.t_prime if g.residual_degree(t, state.c_prime) > d}
    if not heavy:
        return frozenset()
    return frozenset(v for t in heavy for v in g.neighbors(t) if v in state.i_prime)


def nonempty_guaranteed(n: int, x_size: int, d: DegreeBound) -> bool:
    """
    True when |V \\ X| > (d+1)(d^2+3d+1)/(d+2) * |X|, the size condition
    under which decompose must return I != ∅ for the deletion set X it found.
    """
    d = check_degree_bound(d)
    ratio = Fraction((d + 1) * (d * d + 3 * d + 1), d + 2)
    return Fraction(n - x_size) > ratio * x_size


def decompose(g: Graph, d: DegreeBound, config: Optional[DecompositionConfig] = None) -> DBoundedDecomposition:
    """
    Compute a d-bounded decomposition (I, C, T, J) of g.

    Phase 1 packs (d+1)-stars and upgrades the packing while the matching
    finds more full stars; Phase 2 runs basic; Phase 3 ejects bad vertices
    from I' and re-runs basic on G[C' ∪ I'] until no bad vertex is left.
    I and C may both be empty.
    """
    d = check_degree_bound(d)
    config = config or DecompositionConfig()
    stats = DecompositionStats(config.packing_policy, config.matching_algorithm)
    if g.n == 0:
        return DBoundedDecomposition(frozenset(), frozenset(), frozenset(), frozenset(), stats=stats)

    everything = frozenset(g.vertices())
    packing = maximal_star_packing(g, d, policy=config.packing_policy)

    # Phase 1 with packing upgrades
    while True:
        x = packing.covered
        y = everything - x
        h = build_bipartite(g, x, y)
        matching = maximum_matching(build_auxiliary(h, d), config.matching_algorithm)
        marked = project_matching(h, matching, d)
        full = [star for star in packing_from_marked(marked) if len(star) == d + 1]
        if len(full) <= len(packing):
            break
        upgraded = maximal_star_packing(g, d, seed=StarPacking(tuple(full)), policy=config.packing_policy)
        if len(upgraded) <= len(packing):
            raise DecompositionError("Star packing upgrade did not grow the packing")
        stats.packing_upgrades += 1
        logger.debug(f"Packing upgrade {stats.packing_upgrades}: {len(packing)} -> {len(upgraded)} stars")
        packing = upgraded
        if stats.packing_upgrades > g.n:
            raise DecompositionError("Packing upgrades exceeded the vertex count")

    stats.phase1_stars = len(packing)
    stats.deletion_set_size = len(x)

    # Phase 2
    result = _settle(h, marked, d, config.check_invariants)
    c_prime, i_prime, witness = result.c_prime, result.i_prime, result.witness_packing
    stats.c_history.append(len(c_prime))

    # Phase 3
    initial_c = len(c_prime)
    c_before_last_call: Optional[int] = None
    while True:
        state = RepairState.of(g, c_prime, i_prime, stats.repair_iterations)
        bad = bad_vertices(g, state, d)
        if not bad:
            break
        if config.check_invariants and c_before_last_call is not None and len(c_prime) >= c_before_last_call:
            raise DecompositionError(f"Repair iteration {state.iteration} did not shrink C' ({len(c_prime)})")
        stats.repair_iterations += 1
        if stats.repair_iterations > initial_c + 1:
            raise DecompositionError("Repair iterations exceeded |C'| + 1")
        logger.debug(
            f"Repair iteration {stats.repair_iterations}: |C'|={len(c_prime)}, "
            f"|I'|={len(i_prime)}, {len(bad)} bad vertices"
        )
        c_before_last_call = len(c_prime)
        # equivalent to basic(G[C' ∪ I'_0], C', I'_0): H only sees edges between the two sides
        result = _match_and_settle(g, c_prime, i_prime - bad, d, config.matching_algorithm, config.check_invariants)
        c_prime, i_prime, witness = result.c_prime, result.i_prime, result.witness_packing
        stats.c_history.append(len(c_prime))

    t = open_neighborhood(g, i_prime) - c_prime
    j = everything - i_prime - c_prime - t
    logger.debug(
        f"Decomposition on n={g.n}: |I|={len(i_prime)}, |C|={len(c_prime)}, |T|={len(t)}, |J|={len(j)}"
    )
    return DBoundedDecomposition(i_prime, c_prime, t, j, witness, stats)


def trivial_reduction(g: Graph, d: DegreeBound) -> DBoundedDecomposition:
    """I = vertices whose closed neighbourhood has degree <= d throughout, C = ∅"""
    d = check_degree_bound(d)
    low = [g.degree(v) <= d for v in g.vertices()]
    r = frozenset(v for v in g.vertices() if low[v] and all(low[u] for u in g.neighbors(v)))
    t = open_neighborhood(g, r)
    j = frozenset(g.vertices()) - r - t
    return DBoundedDecomposition(r, frozenset(), t, j)


def _edge_between(g: Graph, a: VertexSet, b: VertexSet) -> Optional[Tuple[int, int]]:
    for u in sorted(a):
        for v in g.neighbors(u):
            if v in b:
                return (u, v)
    return None


def validate_decomposition(g: Graph, d: DegreeBound, dec: DBoundedDecomposition) -> DecompositionReport:
    """
    Check the partition and the three d-bounded conditions. For d = 0 also
    report whether (I, C, J ∪ T) is a crown decomposition. Failures are
    collected as violations, never raised.
    """
    d = check_degree_bound(d)
    violations: List[str] = []
    parts = {'I': dec.i, 'C': dec.c, 'T': dec.t, 'J': dec.j}

    partition = True
    for name, part in parts.items():
        outside = sorted(v for v in part if not 0 <= v < g.n)
        if outside:
            partition = False
            violations.append(f"{name} contains vertices outside the graph: {outside}")
    names = list(parts)
    for a in range(len(names)):
        for b in range(a + 1, len(names)):
            shared = parts[names[a]] & parts[names[b]]
            if shared:
                partition = False
                violations.append(f"{names[a]} and {names[b]} share vertices {sorted(shared)}")
    missing = sorted(set(g.vertices()) - dec.i - dec.c - dec.t - dec.j)
    if missing:
        partition = False
        violations.append(f"Vertices in no part: {missing}")

    if not partition:
        return DecompositionReport(False, False, False, False, violations=violations)

    condition1 = True
    for v in sorted(dec.i | dec.t):
        degree = g.residual_degree(v, dec.c)
        if degree > d:
            condition1 = False
            violations.append(f"Vertex {v} has degree {degree} > {d} in G[V \\ C]")

    offending = _edge_between(g, dec.i, dec.j)
    condition2 = offending is None
    if offending is not None:
        violations.append(f"Edge {offending} joins I and J")

    try:
        condition3 = find_full_star_packing(g, dec.c, dec.i, d) is not None
    except BDDKernelError as e:
        condition3 = False
        violations.append(f"Star packing check failed: {e}")
    if not condition3:
        violations.append(f"No full {d + 1}-star packing from C to I")

    witness = None
    if dec.witness_packing.stars:
        witness = _check_witness(g, d, dec, violations)

    crown = None
    if d == 0:
        independent = _edge_between(g, dec.i, dec.i) is None
        crown = independent and _edge_between(g, dec.i, dec.j | dec.t) is None and condition3
        if not independent:
            violations.append("I is not independent")

    return DecompositionReport(partition, condition1, condition2, condition3, witness, crown, violations)


def _check_witness(g: Graph, d: int, dec: DBoundedDecomposition, violations: List[str]) -> bool:
    packing = dec.witness_packing
    try:
        packing.verify(g)
    except (StarPackingError, BDDKernelError) as e:
        violations.append(f"Witness packing invalid: {e}")
        return False
    ok = packing.centers == dec.c and all(
        len(star) == d + 1 and set(star.leaves) <= dec.i for star in packing
    )
    if not ok:
        violations.append("Witness packing is not a full star packing from C to I")
    return ok
