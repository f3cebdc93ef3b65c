# cli.py
# BDDKERN - Command line surface: kernelize, solve, verify, gen, batch

import logging
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import click
import networkx as nx
import pandas as pd
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table

from src.decomposition import DBoundedDecomposition, DecompositionConfig, DecompositionReport, validate_decomposition
from src.exact_solver import HARD_VERTEX_CAP, ExactConfig, TooLargeError, solve_exact
from src.graph_core import BDDKernelError, Graph, new_graph, open_neighborhood
from src.kernelization import KernelResult, bound_factor, kernelize, lift_solution
from src.matching import MATCHING_ALGORITHMS
from src.star_packing import PACKING_POLICIES

"""
Command line utility for Bounded-Degree Vertex Deletion kernelization.

Reads DIMACS-like or plain edge-list instances, shrinks them with the BDD
loop and reports kernels, partial solutions and verification verdicts.
"""

console = Console()
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_REFUSED = 2
EXIT_PARSE_ERROR = 3

DIMACS = 'dimacs'
PLAIN = 'plain'
AUTO = 'auto'


class InstanceParseError(BDDKernelError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"Line {line}: {message}")


class HeaderMismatchError(InstanceParseError):
    pass


@dataclass
class RunReport:
    """One kernelization run, flattened for the stats record"""
    n: int
    m: int
    d: int
    kernel_n: int
    kernel_m: int
    c_size: int
    i_size: int
    rounds: int
    packing_upgrades: int
    repair_iterations: int
    bound_factor: int
    packing_policy: str
    matching_algorithm: str
    wall_time_s: float
    alpha_lower_bound: int
    alpha_kernel: Optional[int] = None
    bound_ratio: Optional[float] = None
    bound_ok: Optional[bool] = None
    instance: Optional[str] = None

    def __post_init__(self):
        if self.kernel_n + self.c_size + self.i_size != self.n:
            raise BDDKernelError(
                f"Kernel ({self.kernel_n}) + |C| ({self.c_size}) + |I| ({self.i_size}) != n ({self.n})"
            )

    @classmethod
    def from_result(cls, result: KernelResult, wall_time: float, instance: Optional[str] = None) -> 'RunReport':
        return cls(
            n=result.source.n,
            m=result.source.m,
            d=result.d,
            kernel_n=result.kernel.n,
            kernel_m=result.kernel.m,
            c_size=len(result.c_total),
            i_size=len(result.i_total),
            rounds=result.rounds,
            packing_upgrades=result.packing_upgrades,
            repair_iterations=result.repair_iterations,
            bound_factor=bound_factor(result.d),
            packing_policy=result.packing_policy,
            matching_algorithm=result.matching_algorithm,
            wall_time_s=round(wall_time, 6),
            alpha_lower_bound=result.alpha_lower_bound,
            instance=instance,
        )

    def record_alpha(self, alpha: int) -> None:
        self.alpha_kernel = alpha
        if alpha:
            self.bound_ratio = self.kernel_n / alpha
        else:
            self.bound_ratio = 0.0 if self.kernel_n == 0 else math.inf
        self.bound_ok = self.kernel_n <= self.bound_factor * alpha

    def to_stats_text(self) -> str:
        lines = [f"{key}={value}" for key, value in asdict(self).items() if value is not None]
        return "\n".join(lines) + "\n"


def _detect_format(lines: List[str]) -> str:
    for raw in lines:
        text = raw.strip()
        if not text or text.startswith('c'):
            continue
        return DIMACS if text.startswith('p') else PLAIN
    return PLAIN


def parse_graph_text(text: str, fmt: str = AUTO) -> Graph:
    """
    Parse an instance.

    DIMACS-like: 'p edge <n> <m>' then 'e <u> <v>' with 1-based ids.
    Plain: '<n> <m>' then '<u> <v>' with 0-based ids.
    Lines starting with 'c' are comments; 'c label <id> <original>' restores
    original vertex labels written by serialize_graph.
    """
    lines = text.splitlines()
    if fmt == AUTO:
        fmt = _detect_format(lines)
    offset = 1 if fmt == DIMACS else 0

    header: Optional[Tuple[int, int]] = None
    header_line = 0
    edges: List[Tuple[int, int]] = []
    labels: Dict[int, int] = {}

    for number, raw in enumerate(lines, 1):
        tokens = raw.split()
        if not tokens:
            continue
        if tokens[0] == 'c':
            if len(tokens) == 4 and tokens[1] == 'label':
                try:
                    labels[int(tokens[2]) - offset] = int(tokens[3])
                except ValueError:
                    raise InstanceParseError(number, f"Malformed label line '{raw.strip()}'") from None
            continue
        try:
            if header is None:
                if fmt == DIMACS:
                    if len(tokens) != 4 or tokens[0] != 'p' or tokens[1] != 'edge':
                        raise InstanceParseError(number, "Expected 'p edge <n> <m>'")
                    header = (int(tokens[2]), int(tokens[3]))
                else:
                    if len(tokens) != 2:
                        raise InstanceParseError(number, "Expected '<n> <m>'")
                    header = (int(tokens[0]), int(tokens[1]))
                header_line = number
                continue
            if fmt == DIMACS:
                if len(tokens) != 3 or tokens[0] != 'e':
                    raise InstanceParseError(number, "Expected 'e <u> <v>'")
                u, v = int(tokens[1]), int(tokens[2])
            else:
                if len(tokens) != 2:
                    raise InstanceParseError(number, "Expected '<u> <v>'")
                u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise InstanceParseError(number, f"Non-integer token in '{raw.strip()}'") from None
        edges.append((u - offset, v - offset))

    if header is None:
        raise InstanceParseError(len(lines), "Missing header")
    n, m = header
    if m != len(edges):
        raise HeaderMismatchError(header_line, f"Header declares {m} edges, found {len(edges)}")

    label_list = None
    if labels:
        if sorted(labels) != list(range(n)):
            raise InstanceParseError(header_line, "Label comments must cover every vertex exactly once")
        label_list = [labels[v] for v in range(n)]
    return new_graph(n, edges, label_list)


def read_instance_text(path) -> str:
    """Read a text file, turning undecodable bytes into an InstanceParseError"""
    data = Path(path).read_bytes()
    try:
        return data.decode('utf-8')
    except UnicodeDecodeError as e:
        line = data.count(b'\n', 0, e.start) + 1
        raise InstanceParseError(line, f"Byte 0x{data[e.start]:02x} is not valid UTF-8") from None


def parse_graph(path, fmt: str = AUTO) -> Graph:
    return parse_graph_text(read_instance_text(path), fmt)


def serialize_graph(g: Graph, fmt: str = PLAIN) -> str:
    """Write g in the given format, with label comments when labels are not 0..n-1"""
    offset = 1 if fmt == DIMACS else 0
    out = [f"p edge {g.n} {g.m}" if fmt == DIMACS else f"{g.n} {g.m}"]
    if g.labels != tuple(range(g.n)):
        out.extend(f"c label {v + offset} {g.label(v)}" for v in g.vertices())
    prefix = "e " if fmt == DIMACS else ""
    out.extend(f"{prefix}{u + offset} {v + offset}" for u, v in g.edges())
    return "\n".join(out) + "\n"


def format_sets(result: KernelResult) -> str:
    c_line = " ".join(str(v) for v in sorted(result.c_total))
    i_line = " ".join(str(v) for v in sorted(result.i_total))
    return f"C: {c_line}".rstrip() + "\n" + f"I: {i_line}".rstrip() + "\n"


def parse_sets_text(text: str) -> Tuple[List[int], List[int]]:
    """Read 'C:' and 'I:' lines of original labels; each key may appear once"""
    found: Dict[str, List[int]] = {}
    for number, raw in enumerate(text.splitlines(), 1):
        stripped = raw.strip()
        if not stripped or stripped.startswith('c '):
            continue
        key, sep, rest = stripped.partition(':')
        key = key.strip()
        if not sep or key not in ('C', 'I'):
            raise InstanceParseError(number, f"Expected 'C:' or 'I:' line, got '{stripped}'")
        if key in found:
            raise InstanceParseError(number, f"Duplicate '{key}:' line")
        try:
            found[key] = [int(tok) for tok in rest.split()]
        except ValueError:
            raise InstanceParseError(number, f"Non-integer label in '{stripped}'") from None
    return found.get('C', []), found.get('I', [])


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity > 1:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def _kernelize_file(path: str, degree: int, packing_policy: str, matching_algorithm: str) -> Dict:
    """Batch worker: kernelize one file and return its report row"""
    name = Path(path).name
    try:
        graph = parse_graph(path)
        start = time.perf_counter()
        result = kernelize(graph, degree, DecompositionConfig(packing_policy, matching_algorithm))
        report = RunReport.from_result(result, time.perf_counter() - start, name)
        return {**asdict(report), 'error': None}
    except (BDDKernelError, OSError) as e:
        return {'instance': name, 'error': str(e)}


class KernelCLI:
    """
    Command line utility for Bounded-Degree Vertex Deletion kernels

    Holds the decomposition settings shared by every subcommand and the
    console rendering of reports and verdicts.
    """

    def __init__(self, config: Optional[DecompositionConfig] = None):
        self.config = config or DecompositionConfig()

    def load_graph(self, path: str, fmt: str = AUTO) -> Graph:
        """Parse an instance file, exiting with the parse-error code on failure"""
        try:
            graph = parse_graph(path, fmt)
        except (BDDKernelError, OSError) as e:
            console.print(f"[red]Could not read {path}: {e}[/red]")
            sys.exit(EXIT_PARSE_ERROR)
        logger.info(f"Loaded {path}: n={graph.n}, m={graph.m}")
        return graph

    def run_kernelize(self, graph: Graph, degree: int, instance: Optional[str] = None) -> Tuple[KernelResult, RunReport]:
        start = time.perf_counter()
        result = kernelize(graph, degree, self.config)
        report = RunReport.from_result(result, time.perf_counter() - start, instance)
        return result, report

    def display_report(self, report: RunReport):
        """Display a run report as a Rich table"""
        table = Table(show_header=True, header_style="bold magenta")
        table.add_column("Metric", style="cyan")
        table.add_column("Value", style="green", justify="right")
        for key, value in asdict(report).items():
            if value is None:
                continue
            shown = f"{value:.4f}" if isinstance(value, float) else str(value)
            table.add_row(key, shown)
        console.print(table)

    def display_verdicts(self, report: DecompositionReport):
        table = Table(show_header=True, header_style="bold blue")
        table.add_column("Condition", style="cyan")
        table.add_column("Verdict")
        for name, verdict in report.verdicts().items():
            if verdict is None:
                continue
            table.add_row(name, "[green]PASS[/green]" if verdict else "[red]FAIL[/red]")
        console.print(table)
        for violation in report.violations:
            console.print(f"[red]  - {violation}[/red]")


def _write(path: Optional[str], text: str, what: str):
    if path:
        Path(path).write_text(text)
        console.print(f"[blue]{what} written to {path}[/blue]")


# CLI Command Definitions
@click.group()
@click.option('--verbose', '-v', count=True, help='-v for round summaries, -vv for every iteration')
@click.option('--packing-policy', type=click.Choice(PACKING_POLICIES), default=PACKING_POLICIES[0],
              help='Phase-1 star packing policy')
@click.option('--matching', type=click.Choice(MATCHING_ALGORITHMS), default=MATCHING_ALGORITHMS[0],
              help='Bipartite matching algorithm')
@click.pass_context
def cli(ctx, verbose, packing_policy, matching):
    """
    Bounded-Degree Vertex Deletion kernelizer

    Shrinks a graph to at most (d^3+4d^2+5d+3) times its optimum while
    committing a partial solution C that lifts any optimal kernel solution
    to an optimal solution of the input.

    Examples:
    \b
    # Kernelize for d=1 and write the kernel, sets and stats
    python src/cli.py kernelize --input g.gr --degree 1 --kernel-out k.gr --sets-out s.txt

    # Minimum deletion set via kernel + exact oracle
    python src/cli.py solve --input g.gr --degree 0

    # Random instance
    python src/cli.py gen --n 50 --m 120 --seed 7 --output g.gr
    """
    configure_logging(verbose)
    ctx.ensure_object(dict)
    ctx.obj['cli'] = KernelCLI(DecompositionConfig(packing_policy, matching))


@cli.command('kernelize')
@click.option('--input', '-i', 'input_path', required=True, type=click.Path(), help='Instance file')
@click.option('--degree', '-d', required=True, type=click.IntRange(min=0), help='Degree bound d')
@click.option('--format', '-f', 'fmt', type=click.Choice([AUTO, DIMACS, PLAIN]), default=AUTO, help='Input format')
@click.option('--kernel-out', type=click.Path(), help='Write the kernel graph here')
@click.option('--sets-out', type=click.Path(), help="Write 'C:' and 'I:' lines here")
@click.option('--stats-out', type=click.Path(), help='Write key=value stats here')
@click.option('--exact', is_flag=True, help='Also compute α(kernel) with the exact oracle')
@click.option('--max-exact', type=click.IntRange(0, HARD_VERTEX_CAP), default=24, help='Exact oracle vertex cap')
@click.pass_context
def kernelize_command(ctx, input_path, degree, fmt, kernel_out, sets_out, stats_out, exact, max_exact):
    """Kernelize an instance and report C, I and the kernel"""
    cli_instance = ctx.obj['cli']
    graph = cli_instance.load_graph(input_path, fmt)
    out_fmt = fmt if fmt != AUTO else _detect_format(Path(input_path).read_text().splitlines())

    result, report = cli_instance.run_kernelize(graph, degree, Path(input_path).name)

    refused = None
    if exact:
        try:
            report.record_alpha(len(solve_exact(result.kernel, degree, ExactConfig(max_vertices=max_exact))))
        except TooLargeError as e:
            refused = str(e)
            logger.warning(refused)

    console.print(Panel(f"[bold]Kernel for d={degree}: {result.kernel.n} of {graph.n} vertices[/bold]", style="blue"))
    cli_instance.display_report(report)
    _write(kernel_out, serialize_graph(result.kernel, out_fmt), "Kernel")
    _write(sets_out, format_sets(result), "Sets")
    _write(stats_out, report.to_stats_text(), "Stats")

    if refused:
        console.print(f"[yellow]Refusing exact solve: {refused}[/yellow]")
        sys.exit(EXIT_REFUSED)


@cli.command('solve')
@click.option('--input', '-i', 'input_path', required=True, type=click.Path(), help='Instance file')
@click.option('--degree', '-d', required=True, type=click.IntRange(min=0), help='Degree bound d')
@click.option('--format', '-f', 'fmt', type=click.Choice([AUTO, DIMACS, PLAIN]), default=AUTO, help='Input format')
@click.option('--max-exact', type=click.IntRange(0, HARD_VERTEX_CAP), default=24, help='Exact oracle vertex cap')
@click.pass_context
def solve_command(ctx, input_path, degree, fmt, max_exact):
    """Kernelize, solve the kernel exactly and lift to a minimum deletion set"""
    cli_instance = ctx.obj['cli']
    graph = cli_instance.load_graph(input_path, fmt)
    result, _ = cli_instance.run_kernelize(graph, degree)

    try:
        kernel_solution = solve_exact(result.kernel, degree, ExactConfig(max_vertices=max_exact))
    except TooLargeError as e:
        console.print(f"[yellow]Refusing exact solve: {e}[/yellow]")
        sys.exit(EXIT_REFUSED)

    solution = lift_solution(result, kernel_solution)
    labels = solution.labels()
    console.print(Panel(f"[bold]Minimum {degree}-degree deletion set[/bold]", style="green"))
    console.print(f"size={len(labels)}")
    console.print("solution=" + " ".join(str(v) for v in labels))


@cli.command('verify')
@click.option('--input', '-i', 'input_path', required=True, type=click.Path(), help='Instance file')
@click.option('--degree', '-d', required=True, type=click.IntRange(min=0), help='Degree bound d')
@click.option('--sets', '-s', 'sets_path', required=True, type=click.Path(), help="File with 'C:' and 'I:' lines")
@click.option('--format', '-f', 'fmt', type=click.Choice([AUTO, DIMACS, PLAIN]), default=AUTO, help='Input format')
@click.pass_context
def verify_command(ctx, input_path, degree, sets_path, fmt):
    """Check that C and I induce a d-bounded decomposition"""
    cli_instance = ctx.obj['cli']
    graph = cli_instance.load_graph(input_path, fmt)
    try:
        c_labels, i_labels = parse_sets_text(read_instance_text(sets_path))
        c = frozenset(graph.index_of(label) for label in c_labels)
        i = frozenset(graph.index_of(label) for label in i_labels)
    except (BDDKernelError, OSError) as e:
        console.print(f"[red]Could not read {sets_path}: {e}[/red]")
        sys.exit(EXIT_PARSE_ERROR)

    t = open_neighborhood(graph, i) - c
    j = frozenset(graph.vertices()) - i - c - t
    report = validate_decomposition(graph, degree, DBoundedDecomposition(i, c, t, j))
    cli_instance.display_verdicts(report)
    if report.passed:
        console.print("[green]All conditions pass[/green]")
        sys.exit(EXIT_OK)
    console.print("[red]Verification failed[/red]")
    sys.exit(EXIT_VERIFY_FAILED)


@cli.command('gen')
@click.option('--n', 'n', required=True, type=click.IntRange(min=0), help='Vertex count')
@click.option('--m', 'm', required=True, type=click.IntRange(min=0), help='Edge count')
@click.option('--seed', required=True, type=int, help='PRNG seed')
@click.option('--model', type=click.Choice(['gnm']), default='gnm', help='Random graph model')
@click.option('--format', '-f', 'fmt', type=click.Choice([DIMACS, PLAIN]), default=DIMACS, help='Output format')
@click.option('--output', '-o', type=click.Path(), help='Write here instead of stdout')
def gen_command(n, m, seed, model, fmt, output):
    """Generate a uniform random simple graph with exactly m edges"""
    if m > n * (n - 1) // 2:
        raise click.BadParameter(f"{m} edges do not fit in a simple graph on {n} vertices", param_hint='--m')
    generated = nx.gnm_random_graph(n, m, seed=seed)
    text = serialize_graph(new_graph(n, sorted(generated.edges())), fmt)
    if output:
        Path(output).write_text(text)
        console.print(f"[green]Instance written to {output}[/green]")
    else:
        click.echo(text, nl=False)


@cli.command('batch')
@click.option('--input-dir', required=True, type=click.Path(exists=True, file_okay=False), help='Directory of instances')
@click.option('--degree', '-d', required=True, type=click.IntRange(min=0), help='Degree bound d')
@click.option('--pattern', default='*', help='Glob for instance files')
@click.option('--jobs', '-j', type=click.IntRange(min=1), default=1, help='Instances processed concurrently')
@click.option('--summary-out', type=click.Path(), help='Write the summary as .csv or .md')
@click.pass_context
def batch_command(ctx, input_dir, degree, pattern, jobs, summary_out):
    """Kernelize every instance in a directory and summarise the runs"""
    config = ctx.obj['cli'].config
    paths = sorted(str(p) for p in Path(input_dir).glob(pattern) if p.is_file())
    if not paths:
        console.print(f"[yellow]No files matching '{pattern}' in {input_dir}[/yellow]")
        return

    args = [(p, degree, config.packing_policy, config.matching_algorithm) for p in paths]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_kernelize_file, *zip(*args)))
    else:
        rows = [_kernelize_file(*a) for a in args]

    df = pd.DataFrame(rows)
    columns = [c for c in ['instance', 'n', 'm', 'kernel_n', 'c_size', 'i_size', 'rounds', 'wall_time_s', 'error']
               if c in df.columns]

    table = Table(show_header=True, header_style="bold magenta")
    for column in columns:
        table.add_column(column, style="cyan" if column == 'instance' else None)
    for _, row in df[columns].iterrows():
        table.add_row(*['' if pd.isna(row[c]) else str(row[c]) for c in columns])
    console.print(Panel(f"[bold]Batch summary: {len(df)} instances, d={degree}[/bold]", style="green"))
    console.print(table)

    if summary_out:
        if summary_out.endswith('.md'):
            Path(summary_out).write_text(df.to_markdown(index=False) + "\n")
        else:
            df.to_csv(summary_out, index=False)
        console.print(f"[blue]Summary written to {summary_out}[/blue]")

    failed = int(df['error'].notna().sum()) if 'error' in df.columns else 0
    if failed:
        console.print(f"[red]{failed} instance(s) failed[/red]")
        sys.exit(EXIT_PARSE_ERROR)


if __name__ == '__main__':
    cli()
