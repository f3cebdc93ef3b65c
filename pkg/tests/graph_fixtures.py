# tests/graph_fixtures.py
"""
Shared graphs and brute-force oracles for the test suites
"""
import itertools
import random
import sys
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

# Add parent directory to Python path
sys.path.insert(0, str(Path(__file__).parent.parent))

import networkx as nx

from src.graph_core import Graph, new_graph

STAR_K13_EDGES = [(0, 1), (0, 2), (0, 3)]
CYCLE_C5_EDGES = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]

# x=0, z=1, y1..y5=2..6, w1=7, w2=8, t=9
REPAIR_EXAMPLE_EDGES = [
    (0, 2), (0, 3), (0, 4), (0, 5), (0, 6),
    (4, 9), (9, 1), (1, 7), (1, 8),
]


def star_k13() -> Graph:
    return new_graph(4, STAR_K13_EDGES)


def cycle_c5() -> Graph:
    return new_graph(5, CYCLE_C5_EDGES)


def path_graph(n: int) -> Graph:
    return new_graph(n, [(v, v + 1) for v in range(n - 1)])


def repair_example() -> Graph:
    return new_graph(10, REPAIR_EXAMPLE_EDGES)


def random_graph(n: int, seed: int, m: int = None) -> Graph:
    """Seeded G(n, m); m is drawn uniformly from [0, n(n-1)/2] when omitted"""
    rng = random.Random(seed)
    top = n * (n - 1) // 2
    if m is None:
        m = rng.randint(0, top)
    generated = nx.gnm_random_graph(n, min(m, top), seed=seed)
    return new_graph(n, sorted(generated.edges()))


def random_instances(count: int, max_n: int, degrees: Sequence[int], seed: int = 0):
    """Yield (graph, d) pairs with n uniform in [1, max_n]"""
    rng = random.Random(seed)
    for k in range(count):
        n = rng.randint(1, max_n)
        yield random_graph(n, seed * 100003 + k), rng.choice(list(degrees))


def brute_force_optimum(g: Graph, d: int) -> int:
    """Smallest k such that some k-subset leaves max degree <= d"""
    for k in range(g.n + 1):
        for combo in itertools.combinations(range(g.n), k):
            removed = set(combo)
            if all(g.residual_degree(v, removed) <= d for v in g.vertices() if v not in removed):
                return k
    return g.n


def random_bipartite(rng: random.Random, max_total: int = 8) -> Tuple[List[int], List[int], Dict[int, List[int]]]:
    """Random X, Y with |X| + |Y| <= max_total and an edge set between them"""
    total = rng.randint(1, max_total)
    x_size = rng.randint(0, total)
    xs = list(range(x_size))
    ys = list(range(x_size, total))
    adjacency = {x: [y for y in ys if rng.random() < 0.5] for x in xs}
    return xs, ys, adjacency


def brute_force_star_edges(xs: List[int], adjacency: Dict[int, List[int]], d: int) -> int:
    """Maximum total edge count over all packings of <=(d+1)-stars centred in X with leaves in Y"""
    best = 0

    def search(index: int, used: frozenset, total: int):
        nonlocal best
        if index == len(xs):
            best = max(best, total)
            return
        options = [y for y in adjacency[xs[index]] if y not in used]
        for k in range(min(d + 1, len(options)), -1, -1):
            for leaves in itertools.combinations(options, k):
                search(index + 1, used | set(leaves), total + k)

    search(0, frozenset(), 0)
    return best
