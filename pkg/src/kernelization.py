# kernelization.py
# BDDKERN - The BDD fixpoint loop, kernel bound factor and solution lifting

import logging
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, List, Optional, Tuple

from src.decomposition import DecompositionConfig, decompose
from src.graph_core import (
    BDDKernelError,
    DegreeBound,
    Graph,
    VertexSet,
    check_degree_bound,
    induced_subgraph,
    vertex_set,
)

logger = logging.getLogger(__name__)

MAX_DEGREE_BOUND = 10 ** 6


class KernelizationError(BDDKernelError):
    """Custom exception for kernelization errors"""
    pass


class BoundFactorError(KernelizationError):
    pass


class NotADeletionSetOfKernelError(KernelizationError):
    pass


@dataclass(frozen=True)
class DeletionSet:
    """A vertex set of a specific graph, meant to leave max degree <= d once deleted"""
    members: VertexSet
    graph: Graph = field(repr=False, compare=False)

    def __post_init__(self):
        vertex_set(self.graph, self.members)

    def __len__(self) -> int:
        return len(self.members)

    def labels(self) -> Tuple[int, ...]:
        """Members in original identifiers, ascending"""
        return tuple(sorted(self.graph.label(v) for v in self.members))


@dataclass(frozen=True)
class RoundStats:
    round: int
    n: int
    m: int
    c_size: int
    i_size: int
    repair_iterations: int
    packing_upgrades: int
    phase1_stars: int
    deletion_set_size: int


@dataclass(frozen=True)
class KernelResult:
    """Accumulated C and I in original labels, plus the residual kernel graph"""
    c_total: FrozenSet[int]
    i_total: FrozenSet[int]
    kernel: Graph
    rounds: int
    d: int
    source: Graph = field(repr=False, compare=False)
    stats: Tuple[RoundStats, ...] = ()
    packing_policy: str = ''
    matching_algorithm: str = ''

    @property
    def packing_upgrades(self) -> int:
        return sum(s.packing_upgrades for s in self.stats)

    @property
    def repair_iterations(self) -> int:
        return sum(s.repair_iterations for s in self.stats)

    @property
    def alpha_lower_bound(self) -> int:
        """
        Stars packed in the final round. The final round ran on the kernel
        itself and each (d+1)-star needs a deleted vertex, so this bounds
        α(kernel) from below.
        """
        if not self.stats or self.stats[-1].c_size or self.stats[-1].i_size:
            return 0
        return self.stats[-1].phase1_stars


def bound_factor(d: DegreeBound) -> int:
    """d^3 + 4d^2 + 5d + 3: kernel vertices per unit of optimum"""
    try:
        d = check_degree_bound(d)
    except BDDKernelError as e:
        raise BoundFactorError(str(e)) from e
    if d > MAX_DEGREE_BOUND:
        raise BoundFactorError(f"Degree bound {d} exceeds {MAX_DEGREE_BOUND}")
    return d ** 3 + 4 * d ** 2 + 5 * d + 3


def kernelize(g: Graph, d: DegreeBound, config: Optional[DecompositionConfig] = None) -> KernelResult:
    """
    Run decompose on G[V \\ (C ∪ I)] until a round returns I' = ∅.

    Args:
        g: Input graph
        d: Degree bound
        config: Decomposition settings shared by every round

    Returns:
        KernelResult whose kernel is G[V \\ (C ∪ I)] with original labels
    """
    d = check_degree_bound(d)
    config = config or DecompositionConfig()
    c_total: set = set()
    i_total: set = set()
    round_stats: List[RoundStats] = []
    current = g

    while True:
        dec = decompose(current, d, config)
        rounds = len(round_stats) + 1
        round_stats.append(RoundStats(
            round=rounds,
            n=current.n,
            m=current.m,
            c_size=len(dec.c),
            i_size=len(dec.i),
            repair_iterations=dec.stats.repair_iterations,
            packing_upgrades=dec.stats.packing_upgrades,
            phase1_stars=dec.stats.phase1_stars,
            deletion_set_size=dec.stats.deletion_set_size,
        ))
        c_total.update(current.label(v) for v in dec.c)
        i_total.update(current.label(v) for v in dec.i)
        logger.info(f"Round {rounds}: n={current.n}, |C'|={len(dec.c)}, |I'|={len(dec.i)}")

        if dec.c or dec.i:
            current = induced_subgraph(current, set(current.vertices()) - dec.c - dec.i)
        if not dec.i:
            break
        if rounds > g.n + 1:
            raise KernelizationError(f"Kernelization did not converge within {g.n + 1} rounds")

    logger.info(
        f"Kernel: {current.n} of {g.n} vertices, |C|={len(c_total)}, |I|={len(i_total)}, {len(round_stats)} rounds"
    )
    return KernelResult(
        c_total=frozenset(c_total),
        i_total=frozenset(i_total),
        kernel=current,
        rounds=len(round_stats),
        d=d,
        source=g,
        stats=tuple(round_stats),
        packing_policy=config.packing_policy,
        matching_algorithm=config.matching_algorithm,
    )


def is_deletion_set(g: Graph, d: DegreeBound, s) -> bool:
    """True iff deleting s (a DeletionSet or vertex indices) leaves max degree <= d"""
    d = check_degree_bound(d)
    members = s.members if isinstance(s, DeletionSet) else s
    removed = vertex_set(g, members)
    return all(
        g.residual_degree(v, removed) <= d
        for v in g.vertices() if v not in removed
    )


def lift_solution(result: KernelResult, kernel_solution: DeletionSet) -> DeletionSet:
    """
    K' ∪ C as a deletion set of the original graph.

    Raises:
        NotADeletionSetOfKernelError: If kernel_solution does not fix the kernel
    """
    if not is_deletion_set(result.kernel, result.d, kernel_solution.members):
        raise NotADeletionSetOfKernelError("Kernel solution leaves a vertex of degree > d in the kernel")
    labels: Iterable[int] = set(result.c_total) | {result.kernel.label(v) for v in kernel_solution.members}
    members = frozenset(result.source.index_of(label) for label in labels)
    return DeletionSet(members, result.source)
