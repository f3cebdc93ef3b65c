# tests/test_cli.py
import unittest
import sys
from pathlib import Path
from unittest.mock import patch

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

import pandas as pd
from click.testing import CliRunner

from src.cli import (
    DIMACS,
    EXIT_PARSE_ERROR,
    EXIT_REFUSED,
    EXIT_VERIFY_FAILED,
    PLAIN,
    HeaderMismatchError,
    InstanceParseError,
    KernelCLI,
    RunReport,
    cli,
    parse_graph,
    parse_graph_text,
    parse_sets_text,
    serialize_graph,
)
from src.exact_solver import TooLargeError
from src.graph_core import BDDKernelError, DuplicateEdgeError, induced_subgraph, new_graph
from tests.graph_fixtures import cycle_c5, random_graph, random_instances, star_k13

K13_PLAIN = "4 3\n0 1\n0 2\n0 3\n"
C5_DIMACS = "c five-cycle\np edge 5 5\ne 1 2\ne 2 3\ne 3 4\ne 4 5\ne 5 1\n"


class TestParseGraph(unittest.TestCase):
    """Instance formats"""

    def test_dimacs_single_edge(self):
        g = parse_graph_text("p edge 2 1\ne 1 2\n")
        self.assertEqual((g.n, g.edges()), (2, [(0, 1)]))

    def test_plain_star(self):
        self.assertEqual(parse_graph_text(K13_PLAIN, PLAIN), star_k13())

    def test_comments_ignored(self):
        self.assertEqual(parse_graph_text(C5_DIMACS), cycle_c5())

    def test_header_mismatch(self):
        with self.assertRaises(HeaderMismatchError) as ctx:
            parse_graph_text("p edge 2 2\ne 1 2\n")
        self.assertEqual(ctx.exception.line, 1)

    def test_bad_tokens(self):
        with self.assertRaises(InstanceParseError) as ctx:
            parse_graph_text("3 1\n0 x\n", PLAIN)
        self.assertEqual(ctx.exception.line, 2)
        with self.assertRaises(InstanceParseError):
            parse_graph_text("p edge 3 1\n1 2\n", DIMACS)
        with self.assertRaises(InstanceParseError):
            parse_graph_text("")

    def test_graph_errors_propagate(self):
        with self.assertRaises(DuplicateEdgeError):
            parse_graph_text("3 2\n0 1\n1 0\n", PLAIN)

    def test_round_trip_keeps_labels(self):
        """Serialized subgraphs parse back with their original labels"""
        for seed in range(10):
            g = induced_subgraph(random_graph(15, seed), range(3, 15, 2))
            for fmt in (DIMACS, PLAIN):
                self.assertEqual(parse_graph_text(serialize_graph(g, fmt), fmt), g)

    def test_default_labels_are_not_written(self):
        self.assertNotIn("label", serialize_graph(star_k13(), DIMACS))

    def test_sets_file(self):
        self.assertEqual(parse_sets_text("C: 0\nI: 1 2 3\n"), ([0], [1, 2, 3]))
        self.assertEqual(parse_sets_text("C:\nI:\n"), ([], []))
        with self.assertRaises(InstanceParseError):
            parse_sets_text("X: 1\n")

    def test_repeated_set_line_rejected(self):
        with self.assertRaises(InstanceParseError) as ctx:
            parse_sets_text("C: 0\nI: 1\nC: 1\n")
        self.assertEqual(ctx.exception.line, 3)
        with self.assertRaises(InstanceParseError):
            parse_sets_text("I: 1\nI:\n")

    def test_undecodable_bytes_rejected(self):
        with CliRunner().isolated_filesystem():
            Path('latin.gr').write_bytes(b"p edge 2 1\ne 1 \xff2\n")
            with self.assertRaises(InstanceParseError) as ctx:
                parse_graph('latin.gr')
            self.assertEqual(ctx.exception.line, 2)


class TestRunReport(unittest.TestCase):

    def test_arithmetic_invariant(self):
        kwargs = dict(n=5, m=5, d=0, kernel_n=5, kernel_m=5, c_size=0, i_size=0, rounds=1,
                      packing_upgrades=0, repair_iterations=0, bound_factor=3,
                      packing_policy='lowest_index', matching_algorithm='hopcroft_karp',
                      wall_time_s=0.0, alpha_lower_bound=2)
        report = RunReport(**kwargs)
        report.record_alpha(3)
        self.assertTrue(report.bound_ok)
        self.assertIn("alpha_kernel=3", report.to_stats_text())
        with self.assertRaises(BDDKernelError):
            RunReport(**{**kwargs, 'c_size': 1})


class TestCommands(unittest.TestCase):
    """click commands end to end"""

    def setUp(self):
        self.runner = CliRunner()

    def _write(self, name, text):
        Path(name).write_text(text)
        return name

    def test_kernelize_star(self):
        with self.runner.isolated_filesystem():
            self._write('k13.txt', K13_PLAIN)
            result = self.runner.invoke(cli, [
                'kernelize', '--input', 'k13.txt', '--degree', '0',
                '--kernel-out', 'kernel.txt', '--sets-out', 'sets.txt', '--stats-out', 'stats.txt',
            ])
            self.assertEqual(result.exit_code, 0, result.output)
            self.assertEqual(Path('sets.txt').read_text(), "C: 0\nI: 1 2 3\n")
            self.assertEqual(parse_graph_text(Path('kernel.txt').read_text()).n, 0)
            stats = Path('stats.txt').read_text()
            self.assertIn("kernel_n=0", stats)
            self.assertIn("bound_factor=3", stats)

            verify = self.runner.invoke(cli, ['verify', '--input', 'k13.txt', '--degree', '0', '--sets', 'sets.txt'])
            self.assertEqual(verify.exit_code, 0, verify.output)

    def test_kernelize_cycle_with_exact(self):
        with self.runner.isolated_filesystem():
            self._write('c5.gr', C5_DIMACS)
            result = self.runner.invoke(cli, [
                'kernelize', '-i', 'c5.gr', '-d', '0', '--exact',
                '--kernel-out', 'kernel.gr', '--sets-out', 'sets.txt', '--stats-out', 'stats.txt',
            ])
            self.assertEqual(result.exit_code, 0, result.output)
            self.assertEqual(parse_graph_text(Path('kernel.gr').read_text()), cycle_c5())
            self.assertTrue(Path('kernel.gr').read_text().startswith("p edge 5 5"))
            self.assertEqual(Path('sets.txt').read_text(), "C:\nI:\n")
            stats = Path('stats.txt').read_text()
            self.assertIn("alpha_kernel=3", stats)
            self.assertIn("bound_ok=True", stats)

    def test_exact_refusal(self):
        with self.runner.isolated_filesystem():
            self._write('c5.gr', C5_DIMACS)
            result = self.runner.invoke(cli, ['kernelize', '-i', 'c5.gr', '-d', '0', '--exact', '--max-exact', '3'])
            self.assertEqual(result.exit_code, EXIT_REFUSED)
            self.assertIn("Refusing", result.output)

    def test_parse_failure_exit_code(self):
        with self.runner.isolated_filesystem():
            self._write('bad.gr', "p edge 2 2\ne 1 2\n")
            result = self.runner.invoke(cli, ['kernelize', '-i', 'bad.gr', '-d', '0'])
            self.assertEqual(result.exit_code, EXIT_PARSE_ERROR)
            missing = self.runner.invoke(cli, ['solve', '-i', 'nowhere.gr', '-d', '0'])
            self.assertEqual(missing.exit_code, EXIT_PARSE_ERROR)

    def test_undecodable_files_exit_with_parse_error(self):
        with self.runner.isolated_filesystem():
            Path('latin.gr').write_bytes(b"p edge 2 1\ne 1 \xff2\n")
            self._write('k13.txt', K13_PLAIN)
            Path('latin_sets.txt').write_bytes(b"C: 0\nI: 1 \xe92\n")
            for command in ('kernelize', 'solve'):
                result = self.runner.invoke(cli, [command, '-i', 'latin.gr', '-d', '0'])
                self.assertEqual(result.exit_code, EXIT_PARSE_ERROR, result.output)
                self.assertIn("not valid UTF-8", result.output)
            sets = self.runner.invoke(cli, ['verify', '-i', 'k13.txt', '-d', '0', '-s', 'latin_sets.txt'])
            self.assertEqual(sets.exit_code, EXIT_PARSE_ERROR, sets.output)

            Path('instances').mkdir()
            Path('instances/latin.gr').write_bytes(b"p edge 2 1\ne 1 \xff2\n")
            Path('instances/k13.txt').write_text(K13_PLAIN)
            batch = self.runner.invoke(cli, ['batch', '--input-dir', 'instances', '-d', '0'])
            self.assertEqual(batch.exit_code, EXIT_PARSE_ERROR)
            self.assertIn("1 instance(s) failed", batch.output)

    def test_low_degree_input(self):
        with self.runner.isolated_filesystem():
            self._write('p.txt', "3 2\n0 1\n1 2\n")
            result = self.runner.invoke(cli, ['kernelize', '-i', 'p.txt', '-d', '2', '--sets-out', 's.txt'])
            self.assertEqual(result.exit_code, 0, result.output)
            self.assertEqual(Path('s.txt').read_text(), "C:\nI: 0 1 2\n")

    def test_solve_examples(self):
        with self.runner.isolated_filesystem():
            self._write('k13.txt', K13_PLAIN)
            self._write('c5.gr', C5_DIMACS)
            self._write('empty.txt', "3 0\n")
            star = self.runner.invoke(cli, ['solve', '-i', 'k13.txt', '-d', '1'])
            self.assertEqual(star.exit_code, 0, star.output)
            self.assertIn("size=1", star.output)
            self.assertIn("solution=0", star.output)
            cycle = self.runner.invoke(cli, ['solve', '-i', 'c5.gr', '-d', '0'])
            self.assertIn("size=3", cycle.output)
            empty = self.runner.invoke(cli, ['solve', '-i', 'empty.txt', '-d', '0'])
            self.assertIn("size=0", empty.output)

    @patch('src.cli.solve_exact', side_effect=TooLargeError(40, 24))
    def test_solve_refusal(self, mock_solve):
        with self.runner.isolated_filesystem():
            self._write('c5.gr', C5_DIMACS)
            result = self.runner.invoke(cli, ['solve', '-i', 'c5.gr', '-d', '0'])
            self.assertEqual(result.exit_code, EXIT_REFUSED)
            mock_solve.assert_called_once()

    def test_verify_failures(self):
        with self.runner.isolated_filesystem():
            self._write('k13.txt', K13_PLAIN)
            self._write('bad.txt', "C:\nI: 1\n")
            self._write('empty.txt', "C:\nI:\n")
            self._write('unknown.txt', "C: 9\nI:\n")
            bad = self.runner.invoke(cli, ['verify', '-i', 'k13.txt', '-d', '0', '-s', 'bad.txt'])
            self.assertEqual(bad.exit_code, EXIT_VERIFY_FAILED)
            self.assertIn("FAIL", bad.output)
            empty = self.runner.invoke(cli, ['verify', '-i', 'k13.txt', '-d', '0', '-s', 'empty.txt'])
            self.assertEqual(empty.exit_code, 0, empty.output)
            unknown = self.runner.invoke(cli, ['verify', '-i', 'k13.txt', '-d', '0', '-s', 'unknown.txt'])
            self.assertEqual(unknown.exit_code, EXIT_PARSE_ERROR)

    def test_verify_rejects_repeated_set_lines(self):
        with self.runner.isolated_filesystem():
            self._write('k13.txt', K13_PLAIN)
            self._write('twice.txt', "C: 1\nI:\nC: 0\n")
            result = self.runner.invoke(cli, ['verify', '-i', 'k13.txt', '-d', '0', '-s', 'twice.txt'])
            self.assertEqual(result.exit_code, EXIT_PARSE_ERROR)
            self.assertIn("Duplicate", result.output)

    def test_dimacs_ids_are_reported_zero_based(self):
        """'e 1 2' is vertex 0 to vertex 1 in sets files, solutions and kernel labels"""
        with self.runner.isolated_filesystem():
            self._write('k13.gr', "p edge 4 3\ne 1 2\ne 1 3\ne 1 4\n")
            result = self.runner.invoke(cli, ['kernelize', '-i', 'k13.gr', '-d', '0', '--sets-out', 'sets.txt'])
            self.assertEqual(result.exit_code, 0, result.output)
            self.assertEqual(Path('sets.txt').read_text(), "C: 0\nI: 1 2 3\n")
            solve = self.runner.invoke(cli, ['solve', '-i', 'k13.gr', '-d', '1'])
            self.assertIn("solution=0", solve.output)
            verify = self.runner.invoke(cli, ['verify', '-i', 'k13.gr', '-d', '0', '-s', 'sets.txt'])
            self.assertEqual(verify.exit_code, 0, verify.output)

    def test_verify_accepts_every_kernelize_output(self):
        """Sets files written by kernelize pass verify on random graphs in both formats"""
        with self.runner.isolated_filesystem():
            for k, (g, d) in enumerate(random_instances(40, 30, (0, 1, 2, 3), seed=41)):
                fmt = DIMACS if k % 2 else PLAIN
                self._write('g.txt', serialize_graph(g, fmt))
                result = self.runner.invoke(cli, ['kernelize', '-i', 'g.txt', '-d', str(d), '--sets-out', 'sets.txt'])
                self.assertEqual(result.exit_code, 0, result.output)
                verify = self.runner.invoke(cli, ['verify', '-i', 'g.txt', '-d', str(d), '-s', 'sets.txt'])
                self.assertEqual(verify.exit_code, 0, f"instance {k}: {verify.output}")

    def test_gen(self):
        with self.runner.isolated_filesystem():
            k4 = self.runner.invoke(cli, ['gen', '--n', '4', '--m', '6', '--seed', '1'])
            self.assertEqual(k4.exit_code, 0, k4.output)
            self.assertEqual(parse_graph_text(k4.output).degrees(), [3, 3, 3, 3])

            edgeless = self.runner.invoke(cli, ['gen', '--n', '5', '--m', '0', '--seed', '1', '-f', 'plain'])
            self.assertEqual(parse_graph_text(edgeless.output).m, 0)

            first = self.runner.invoke(cli, ['gen', '--n', '10', '--m', '15', '--seed', '7', '-o', 'a.gr'])
            self.assertEqual(first.exit_code, 0, first.output)
            self.runner.invoke(cli, ['gen', '--n', '10', '--m', '15', '--seed', '7', '-o', 'b.gr'])
            g = parse_graph_text(Path('a.gr').read_text())
            self.assertEqual((g.n, g.m), (10, 15))
            self.assertEqual(Path('a.gr').read_text(), Path('b.gr').read_text())

            too_many = self.runner.invoke(cli, ['gen', '--n', '4', '--m', '7', '--seed', '1'])
            self.assertNotEqual(too_many.exit_code, 0)

    def test_batch(self):
        with self.runner.isolated_filesystem():
            Path('instances').mkdir()
            Path('instances/k13.txt').write_text(K13_PLAIN)
            Path('instances/c5.gr').write_text(C5_DIMACS)
            result = self.runner.invoke(cli, [
                'batch', '--input-dir', 'instances', '-d', '0', '--summary-out', 'summary.csv',
            ])
            self.assertEqual(result.exit_code, 0, result.output)
            df = pd.read_csv('summary.csv')
            self.assertEqual(sorted(df['instance']), ['c5.gr', 'k13.txt'])
            self.assertEqual(int(df.set_index('instance').loc['c5.gr', 'kernel_n']), 5)

            markdown = self.runner.invoke(cli, [
                'batch', '--input-dir', 'instances', '-d', '0', '--summary-out', 'summary.md',
            ])
            self.assertEqual(markdown.exit_code, 0, markdown.output)
            self.assertIn("k13.txt", Path('summary.md').read_text())

    def test_batch_reports_broken_files(self):
        with self.runner.isolated_filesystem():
            Path('instances').mkdir()
            Path('instances/good.txt').write_text(K13_PLAIN)
            Path('instances/broken.txt').write_text("p edge 3 5\n")
            result = self.runner.invoke(cli, ['batch', '--input-dir', 'instances', '-d', '1'])
            self.assertEqual(result.exit_code, EXIT_PARSE_ERROR)
            self.assertIn("1 instance(s) failed", result.output)

    def test_cli_object_carries_config(self):
        cli_instance = KernelCLI()
        _, report = cli_instance.run_kernelize(new_graph(3, [(0, 1)]), 1)
        self.assertEqual(report.i_size, 3)
        self.assertEqual(report.packing_policy, 'lowest_index')


if __name__ == '__main__':
    unittest.main(verbosity=2)
