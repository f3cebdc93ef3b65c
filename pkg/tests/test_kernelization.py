# tests/test_kernelization.py
import unittest
import sys
from pathlib import Path

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.decomposition import DecompositionConfig
from src.exact_solver import optimum_size, solve_exact
from src.graph_core import new_graph
from src.kernelization import (
    BoundFactorError,
    DeletionSet,
    NotADeletionSetOfKernelError,
    bound_factor,
    is_deletion_set,
    kernelize,
    lift_solution,
)
from tests.graph_fixtures import cycle_c5, path_graph, random_instances, star_k13


class TestBoundFactor(unittest.TestCase):

    def test_known_kernels(self):
        """3k, 13k and 37k vertex kernels for d = 0, 1, 2"""
        self.assertEqual(bound_factor(0), 3)
        self.assertEqual(bound_factor(1), 13)
        self.assertEqual(bound_factor(2), 37)
        self.assertEqual(bound_factor(3), 27 + 36 + 15 + 3)

    def test_invalid(self):
        with self.assertRaises(BoundFactorError):
            bound_factor(-1)
        with self.assertRaises(BoundFactorError):
            bound_factor(10 ** 7)


class TestKernelize(unittest.TestCase):
    """The BDD loop on hand-traced instances"""

    def test_low_degree_graph(self):
        """Max degree <= d: everything goes to I in round 1, round 2 is empty"""
        result = kernelize(path_graph(4), 2)
        self.assertEqual(result.i_total, frozenset(range(4)))
        self.assertEqual(result.c_total, frozenset())
        self.assertEqual(result.kernel.n, 0)
        self.assertEqual(result.rounds, 2)

    def test_star_d0(self):
        result = kernelize(star_k13(), 0)
        self.assertEqual(result.c_total, frozenset({0}))
        self.assertEqual(result.i_total, frozenset({1, 2, 3}))
        self.assertEqual(result.kernel.n, 0)
        self.assertEqual(result.rounds, 3)

    def test_cycle_d0_is_its_own_kernel(self):
        result = kernelize(cycle_c5(), 0)
        self.assertEqual(result.kernel, cycle_c5())
        self.assertEqual((result.c_total, result.i_total), (frozenset(), frozenset()))
        self.assertEqual(result.rounds, 1)
        self.assertEqual(result.alpha_lower_bound, 2)

    def test_kernel_keeps_labels(self):
        """Kernel vertices report labels of the input"""
        # C5 on 0..4 next to a K1,3 centred at 5
        g = new_graph(9, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (5, 6), (5, 7), (5, 8)])
        result = kernelize(g, 0)
        self.assertEqual(result.kernel.labels, (0, 1, 2, 3, 4))
        self.assertEqual(result.kernel.m, 5)
        self.assertEqual(result.c_total, frozenset({5}))
        self.assertEqual(result.i_total, frozenset({6, 7, 8}))
        self.assertEqual(result.rounds, 3)

    def test_stats_are_recorded(self):
        result = kernelize(star_k13(), 0, DecompositionConfig(packing_policy='max_degree_first'))
        self.assertEqual(len(result.stats), result.rounds)
        self.assertEqual(result.packing_policy, 'max_degree_first')
        self.assertEqual(result.stats[0].n, 4)

    def test_partition_and_bound(self):
        """C, I and the kernel partition V; |kernel| <= bound_factor(d) * α(kernel)"""
        for k, (g, d) in enumerate(random_instances(200, 14, (0, 1, 2), seed=21)):
            result = kernelize(g, d)
            kernel_labels = set(result.kernel.labels)
            self.assertFalse(result.c_total & result.i_total)
            self.assertFalse(kernel_labels & (result.c_total | result.i_total))
            self.assertEqual(kernel_labels | result.c_total | result.i_total, set(g.labels))
            self.assertLessEqual(result.rounds, g.n + 1)
            alpha_kernel = optimum_size(result.kernel, d)
            self.assertLessEqual(result.kernel.n, bound_factor(d) * alpha_kernel, f"instance {k}")
            self.assertLessEqual(result.alpha_lower_bound, alpha_kernel)

    def test_optimum_preserved_and_lift(self):
        """α(G) = |C| + α(kernel), and lifting an optimal kernel solution is optimal"""
        for k, (g, d) in enumerate(random_instances(200, 14, (0, 1, 2), seed=22)):
            result = kernelize(g, d)
            alpha = optimum_size(g, d)
            kernel_solution = solve_exact(result.kernel, d)
            self.assertEqual(alpha, len(result.c_total) + len(kernel_solution), f"instance {k}")
            lifted = lift_solution(result, kernel_solution)
            self.assertTrue(is_deletion_set(g, d, lifted))
            self.assertEqual(len(lifted), alpha)


    def test_kernel_is_a_fixed_point(self):
        """Kernelizing the kernel again commits and removes nothing"""
        for k, (g, d) in enumerate(random_instances(200, 40, (0, 1, 2, 3), seed=23)):
            result = kernelize(g, d)
            again = kernelize(result.kernel, d)
            self.assertEqual(again.c_total, frozenset(), f"instance {k}")
            self.assertEqual(again.i_total, frozenset(), f"instance {k}")
            self.assertEqual(again.rounds, 1)
            self.assertEqual(again.kernel, result.kernel)

    def test_every_round_but_the_last_removes_vertices(self):
        """Rounds before the last add to I; the last one commits and removes nothing"""
        for k, (g, d) in enumerate(random_instances(200, 40, (0, 1, 2, 3), seed=24)):
            result = kernelize(g, d)
            *progress, last = result.stats
            for stats in progress:
                self.assertGreater(stats.i_size, 0, f"instance {k}, round {stats.round}")
            self.assertEqual((last.c_size, last.i_size), (0, 0), f"instance {k}")
            self.assertEqual(sum(s.i_size for s in result.stats), len(result.i_total))


class TestDeletionSets(unittest.TestCase):

    def test_is_deletion_set(self):
        self.assertTrue(is_deletion_set(star_k13(), 1, {0}))
        self.assertFalse(is_deletion_set(star_k13(), 1, {1}))
        self.assertTrue(is_deletion_set(star_k13(), 3, set()))
        self.assertTrue(is_deletion_set(cycle_c5(), 0, DeletionSet(frozenset({0, 2, 4}), cycle_c5())))

    def test_labels(self):
        g = new_graph(3, [(0, 1)], labels=[7, 3, 5])
        self.assertEqual(DeletionSet(frozenset({0, 1}), g).labels(), (3, 7))

    def test_lift_rejects_bad_kernel_solution(self):
        result = kernelize(cycle_c5(), 0)
        with self.assertRaises(NotADeletionSetOfKernelError):
            lift_solution(result, DeletionSet(frozenset({0}), result.kernel))


if __name__ == '__main__':
    unittest.main(verbosity=2)
