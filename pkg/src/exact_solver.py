# exact_solver.py
# BDDKERN - Exact minimum d-degree deletion sets for small graphs (test oracle)

import itertools
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import networkx as nx

from src.graph_core import (
    BDDKernelError,
    DegreeBound,
    Graph,
    check_degree_bound,
    induced_subgraph,
    to_networkx,
)
from src.kernelization import DeletionSet

logger = logging.getLogger(__name__)

BRANCHING = 'branching'
SUBSETS = 'subsets'
HARD_VERTEX_CAP = 30


class ExactSolverError(BDDKernelError):
    """Custom exception for exact solver errors"""
    pass


class ExactConfigError(ExactSolverError):
    pass


class TooLargeError(ExactSolverError):
    def __init__(self, n: int, cap: int):
        self.n = n
        self.cap = cap
        super().__init__(f"Graph has {n} vertices, exact solving is capped at {cap}")


class BudgetExceededError(ExactSolverError):
    def __init__(self, budget: int):
        self.budget = budget
        super().__init__(f"Optimum exceeds budget k={budget}")


@dataclass
class ExactConfig:
    """Configuration for the exact oracle"""
    max_vertices: int = 24
    budget_k: Optional[int] = None
    strategy: str = BRANCHING

    def __post_init__(self):
        if not 0 <= self.max_vertices <= HARD_VERTEX_CAP:
            raise ExactConfigError(f"max_vertices must lie in [0, {HARD_VERTEX_CAP}], got {self.max_vertices}")
        if self.budget_k is not None and self.budget_k < 0:
            raise ExactConfigError(f"budget_k must be nonnegative, got {self.budget_k}")
        if self.strategy not in (BRANCHING, SUBSETS):
            raise ExactConfigError(f"Unknown strategy '{self.strategy}'")


class _Component:
    """Bitmask view of one connected component"""

    def __init__(self, g: Graph, d: int):
        self.size = g.n
        self.d = d
        self.adj_mask = [0] * g.n
        for v in g.vertices():
            mask = 0
            for u in g.neighbors(v):
                mask |= 1 << u
            self.adj_mask[v] = mask
        self.full = (1 << g.n) - 1

    def first_heavy(self, alive: int) -> Optional[int]:
        """Lowest alive vertex with more than d alive neighbours"""
        m = alive
        while m:
            low = m & -m
            v = low.bit_length() - 1
            if (self.adj_mask[v] & alive).bit_count() > self.d:
                return v
            m ^= low
        return None

    def lower_bound(self, alive: int) -> int:
        """Greedy disjoint (d+1)-stars among alive vertices; each needs one deletion"""
        free = alive
        count = 0
        m = alive
        while m:
            low = m & -m
            v = low.bit_length() - 1
            m ^= low
            if not free & low:
                continue
            nbrs = self.adj_mask[v] & free
            if nbrs.bit_count() > self.d:
                take = low
                for _ in range(self.d + 1):
                    leaf = nbrs & -nbrs
                    take |= leaf
                    nbrs ^= leaf
                free &= ~take
                m &= ~take
                count += 1
        return count

    @staticmethod
    def members(mask: int) -> Tuple[int, ...]:
        out = []
        while mask:
            low = mask & -mask
            out.append(low.bit_length() - 1)
            mask ^= low
        return tuple(out)

    def solve_subsets(self, budget: Optional[int]) -> Optional[Tuple[int, ...]]:
        top = self.size if budget is None else min(budget, self.size)
        for k in range(top + 1):
            for combo in itertools.combinations(range(self.size), k):
                removed = 0
                for v in combo:
                    removed |= 1 << v
                if self.first_heavy(self.full & ~removed) is None:
                    return combo
        return None

    def solve_branching(self, budget: Optional[int]) -> Optional[Tuple[int, ...]]:
        best_size = self.size if budget is None else min(budget, self.size)
        best: List[Optional[Tuple[int, ...]]] = [None]
        bound = [best_size]
        seen = set()

        def search(removed: int, size: int):
            if removed in seen:
                return
            seen.add(removed)
            alive = self.full & ~removed
            v = self.first_heavy(alive)
            if v is None:
                key = self.members(removed)
                if size < bound[0] or best[0] is None or key < best[0]:
                    bound[0] = size
                    best[0] = key
                return
            if size + max(1, self.lower_bound(alive)) > bound[0]:
                return
            nbrs = self.adj_mask[v] & alive
            branch = [v]
            for _ in range(self.d + 1):
                low = nbrs & -nbrs
                branch.append(low.bit_length() - 1)
                nbrs ^= low
            for w in branch:
                search(removed | (1 << w), size + 1)

        search(0, 0)
        return best[0]


def solve_exact(g: Graph, d: DegreeBound, cfg: Optional[ExactConfig] = None) -> DeletionSet:
    """
    Minimum d-degree deletion set, lexicographically smallest among optima.

    Components are solved independently and unioned.

    Raises:
        TooLargeError: If g exceeds cfg.max_vertices
        BudgetExceededError: If the optimum exceeds cfg.budget_k
    """
    d = check_degree_bound(d)
    cfg = cfg or ExactConfig()
    if g.n > cfg.max_vertices:
        raise TooLargeError(g.n, cfg.max_vertices)

    chosen: List[int] = []
    remaining = cfg.budget_k
    for component in sorted(nx.connected_components(to_networkx(g)), key=min):
        members = sorted(component)
        if all(g.degree(v) <= d for v in members):
            continue
        sub = induced_subgraph(g, members)
        solver = _Component(sub, d)
        if cfg.strategy == SUBSETS:
            local = solver.solve_subsets(remaining)
        else:
            local = solver.solve_branching(remaining)
        if local is None:
            raise BudgetExceededError(cfg.budget_k)
        chosen.extend(members[v] for v in local)
        if remaining is not None:
            remaining -= len(local)

    logger.debug(f"Exact optimum for n={g.n}, d={d}: {len(chosen)}")
    return DeletionSet(frozenset(chosen), g)


def optimum_size(g: Graph, d: DegreeBound, cfg: Optional[ExactConfig] = None) -> int:
    """α(G): size of a minimum d-degree deletion set"""
    return len(solve_exact(g, d, cfg))
