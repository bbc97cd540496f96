#!/usr/bin/env python3
"""
Torus Restriction Lab - batch CLI
Runs restriction-ratio sweeps, region classification and the extension
tail probe, and writes CSV/SVG artifacts to an output directory.
"""
import argparse
import csv
import math
import os
import re
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
from rich.console import Console
from rich.table import Table

from errors import ConfigError, LabError
from exponents import ExponentPair, parse_index, sphere_comparison
from experiments import (
    BOUNDARY,
    CONSISTENT,
    FAMILIES,
    INADMISSIBLE,
    classify_region,
    dilation_p_probe,
    dimension_independence,
    knapp_sweep,
    minkowski_chain,
    minkowski_trials,
    random_planar_function,
    tensor_factorization_report,
)
from extension import (
    bessel_j0,
    bessel_j0_series_mp,
    constant_density,
    default_radii,
    expected_growth,
    extension_operator,
    locate_first_zero,
    lp_tail_probe,
)
from functions import IsotropicGaussian, KnappTube
from geometry import TorusGrid
from plots import region_svg, sweep_svg, write_svg

console = Console()
err_console = Console(stderr=True)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DISAGREEMENT = 2

SLOPE_TOL = 0.05
FACTORIZATION_TOL = 1e-10
BESSEL_TOL = 1e-10
FIRST_ZERO = 2.404825557695773

OUT_ENV = 'RESTRICTION_LAB_OUT'

COMMANDS = (
    'region', 'knapp', 'dilation', 'extension-tail', 'tensor-check',
    'dimension-check', 'minkowski', 'bessel', 'sphere-compare',
)

# Built-in defaults, lowest precedence (config file, then environment, then flags)
DEFAULTS = {
    'experiment': 'region',
    'p': '1.2',
    'q': '1',
    'pprime': '4.5',
    'p_min': '1',
    'p_max': '1.6',
    'q_min': '1',
    'q_max': '4',
    'step': '0.05',
    'deltas': '2^-4..2^-9',
    'scales': '4,8,16,32,64',
    'radii': '',
    'rmax': '200',
    'nodes_per_circle': 'auto',
    'families': 'knapp,dilation',
    'dims': '1,2,3',
    'dim': '2',
    'threshold': '0.05',
    'boundary_margin': '0.05',
    'increment_tol': '1e-6',
    'fit_residual_tol': '0.05',
    'workers': '1',
    'trials': '20',
    'seed': '0',
    'out_dir': 'results',
}

CSV_COLUMNS = {
    'region': ('p', 'q', 'admissible', 'knapp_slope', 'dilation_slope', 'status', 'agrees'),
    'knapp': ('p', 'q', 'parameter', 'ratio'),
    'dilation': ('p', 'q', 'parameter', 'ratio'),
    'extension-tail': ('pprime', 'n', 'radius', 'truncated_norm'),
    'tensor-check': ('trial', 'g', 'h', 'p', 'q', 'ratio_torus', 'ratio_product', 'relative_error'),
    'dimension-check': ('n', 'p', 'q', 'status'),
    'minkowski': ('trial', 'p', 'q', 'lhs', 'rhs', 'holds'),
    'bessel': ('r', 'quadrature', 'series', 'abs_error'),
    'sphere-compare': ('n', 'total', 'torus', 'sphere', 'both'),
}

_DYADIC = re.compile(r'^\s*(\d+(?:\.\d+)?)\^(-?\d+)\s*\.\.\s*(\d+(?:\.\d+)?)\^(-?\d+)\s*$')


def _positive_number(text):
    raw = str(text).strip()
    if '^' in raw:
        base, exponent = raw.split('^', 1)
        value = float(base) ** int(exponent)
    else:
        value = float(Fraction(raw))
    if not value > 0:
        raise ValueError(f"expected a positive number, got {text!r}")
    return value


def parse_parameter_list(text):
    """
    Comma list ("0.25,0.125", "1/4,1/8", "2^-2,2^-3") or dyadic range
    ("2^-2..2^-7", both ends included).
    """
    match = _DYADIC.match(str(text))
    if match:
        base, start, base_end, stop = match.groups()
        if float(base) != float(base_end):
            raise ValueError(f"range ends use different bases: {text!r}")
        step = 1 if int(stop) >= int(start) else -1
        return [float(base) ** k for k in range(int(start), int(stop) + step, step)]
    items = [item for item in str(text).split(',') if item.strip()]
    return [_positive_number(item) for item in items]


def _families(text):
    names = [item.strip() for item in str(text).split(',') if item.strip()]
    for name in names:
        if name not in FAMILIES:
            raise ValueError(f"unknown family {name!r} (choose from {', '.join(FAMILIES)})")
    if not names:
        raise ValueError("at least one family is required")
    return tuple(names)


def _positive_int(text):
    value = int(str(text).strip())
    if value < 1:
        raise ValueError(f"expected a positive integer, got {text!r}")
    return value


def _int_list(text):
    return tuple(_positive_int(item) for item in str(text).split(',') if item.strip())


def _nodes(text):
    raw = str(text).strip().lower()
    return None if raw in ('', 'auto') else _positive_int(raw)


def _experiment(text):
    raw = str(text).strip()
    if raw not in COMMANDS:
        raise ValueError(f"unknown experiment {raw!r} (choose from {', '.join(COMMANDS)})")
    return raw


PARSERS = {
    'experiment': _experiment,
    'p': parse_index,
    'q': parse_index,
    'pprime': parse_index,
    'p_min': parse_index,
    'p_max': parse_index,
    'q_min': parse_index,
    'q_max': parse_index,
    'step': lambda text: Fraction(str(text).strip()),
    'deltas': parse_parameter_list,
    'scales': parse_parameter_list,
    'radii': parse_parameter_list,
    'rmax': _positive_number,
    'nodes_per_circle': _nodes,
    'families': _families,
    'dims': _int_list,
    'dim': _positive_int,
    'threshold': float,
    'boundary_margin': float,
    'increment_tol': float,
    'fit_residual_tol': float,
    'workers': _positive_int,
    'trials': _positive_int,
    'seed': int,
    'out_dir': lambda text: str(text).strip(),
}


def _parse_value(key, text, line=None):
    try:
        return PARSERS[key](text)
    except (ValueError, ZeroDivisionError, LabError) as e:
        raise ConfigError(f"{key}: {e}", line=line)


def read_config_file(path):
    """
    Parse ``key=value`` lines; ``#`` starts a comment, blank lines are skipped.

    Returns:
        dict of parsed values for the keys present in the file
    """
    values = {}
    try:
        with open(path, 'r', encoding='utf-8') as f:
            lines = f.readlines()
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e.strerror}")

    for number, raw in enumerate(lines, start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError(f"expected key=value, got {raw.strip()!r}", line=number)
        key, value = (part.strip() for part in line.split('=', 1))
        if key not in PARSERS:
            raise ConfigError(f"unknown key {key!r}", line=number)
        values[key] = _parse_value(key, value, line=number)
    return values


def load_config(path=None, overrides=None, environ=None):
    """
    Resolve the experiment plan.

    Args:
        path: optional config file
        overrides: raw flag values (strings), highest precedence
        environ: environment mapping (defaults to os.environ)

    Returns:
        dict with a parsed value for every key in DEFAULTS
    """
    environ = os.environ if environ is None else environ
    plan = {key: _parse_value(key, text) for key, text in DEFAULTS.items()}
    if path:
        plan.update(read_config_file(path))
    if environ.get(OUT_ENV):
        plan['out_dir'] = environ[OUT_ENV]
    for key, text in (overrides or {}).items():
        plan[key] = _parse_value(key, text)
    return plan


def _fmt(value):
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (float, np.floating, Fraction)):
        return '%.15g' % float(value)
    return str(value)


def agreement_line(agreement, disagreements):
    """Summary line for a region table; the percentage is floored so 100% means no disagreements."""
    line = f"agreement {math.floor(agreement * 100 + 1e-9)}% (non-boundary)"
    if disagreements:
        line += f", {disagreements} disagreement{'s' if disagreements != 1 else ''}"
    return line


def index_range(low, high, step):
    """low, low + step, ... up to high, in exact arithmetic when the inputs are rational."""
    if step <= 0:
        raise ConfigError(f"step must be positive, got {step}")
    if math.isinf(high):
        raise ConfigError("grid bounds must be finite")
    if high < low:
        raise ConfigError(f"empty range: {low} > {high}")
    count = int(math.floor((high - low) / step + Fraction(1, 10 ** 9)))
    return [low + k * step for k in range(count + 1)]


class UsageError(LabError):
    """Bad command line."""


class LabArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    common = LabArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument('--config', help='key=value config file')
    common.add_argument('--out', dest='out_dir', help=f'output directory (env {OUT_ENV})')
    common.add_argument('--nodes', dest='nodes_per_circle', help='nodes per circle (default auto)')
    common.add_argument('--workers', help='parallel grid cells')
    common.add_argument('--quiet', action='store_true', help='suppress decorative output')
    common.add_argument('--p')
    common.add_argument('--q')
    common.add_argument('--pprime')
    common.add_argument('--p-min', dest='p_min')
    common.add_argument('--p-max', dest='p_max')
    common.add_argument('--q-min', dest='q_min')
    common.add_argument('--q-max', dest='q_max')
    common.add_argument('--step')
    common.add_argument('--deltas', help='cap widths, e.g. 2^-4..2^-9')
    common.add_argument('--scales', help='concentration scales, e.g. 4,8,16,32')
    common.add_argument('--radii', help='truncation radii for the tail probe')
    common.add_argument('--rmax', help='largest radius of the default dyadic radii')
    common.add_argument('--families', help=f"comma list from {','.join(FAMILIES)}")
    common.add_argument('--dims', help='circle counts for dimension-check, e.g. 1,2,3')
    common.add_argument('--dim', help='number of circle factors n')
    common.add_argument('--threshold', help='blow-up slope threshold')
    common.add_argument('--boundary-margin', dest='boundary_margin')
    common.add_argument('--increment-tol', dest='increment_tol')
    common.add_argument('--fit-residual-tol', dest='fit_residual_tol')
    common.add_argument('--trials')
    common.add_argument('--seed')

    parser = LabArgumentParser(
        prog='restriction-lab',
        description='Fourier restriction and extension experiments on the torus T^n ⊂ R^{2n}.',
        parents=[common],
        argument_default=argparse.SUPPRESS,
    )
    sub = parser.add_subparsers(dest='command', parser_class=LabArgumentParser)
    for name in COMMANDS:
        sub.add_parser(
            name,
            parents=[common],
            argument_default=argparse.SUPPRESS,
            epilog=f"CSV columns: {','.join(CSV_COLUMNS[name])}",
        )
    return parser


class RestrictionLabCLI:
    """Batch front end: one instance per resolved plan."""

    def __init__(self, plan, quiet=False):
        """
        Args:
            plan: dict returned by load_config
            quiet: suppress decorative output
        """
        self.plan = plan
        self.quiet = quiet
        self.out_dir = Path(plan['out_dir'])

    def info(self, message):
        if not self.quiet:
            err_console.print(message)

    def summary(self, message):
        console.print(message, markup=False, highlight=False)

    def echo_plan(self, keys):
        for key in keys:
            value = self.plan[key]
            if isinstance(value, (list, tuple)):
                value = ','.join(_fmt(v) for v in value)
            self.info(f"[dim]{key}={_fmt(value) if not isinstance(value, str) else value}[/dim]")

    def write_csv(self, command, rows):
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / f"{command.replace('-', '_')}.csv"
        with open(path, 'w', newline='', encoding='utf-8') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(CSV_COLUMNS[command])
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
        self.info(f"[dim]Wrote {path}[/dim]")
        return path

    def write_plot(self, name, text):
        path = self.out_dir / f"{name}.svg"
        write_svg(path, text)
        self.info(f"[dim]Wrote {path}[/dim]")
        return path

    def run(self, command):
        """Dispatch a subcommand and return its exit code."""
        handlers = {
            'region': self.cmd_region,
            'knapp': self.cmd_knapp,
            'dilation': self.cmd_dilation,
            'extension-tail': self.cmd_extension_tail,
            'tensor-check': self.cmd_tensor_check,
            'dimension-check': self.cmd_dimension_check,
            'minkowski': self.cmd_minkowski,
            'bessel': self.cmd_bessel,
            'sphere-compare': self.cmd_sphere_compare,
        }
        handler = handlers.get(command)
        if handler is None:
            raise UsageError(f"unknown command {command!r}")
        return handler()

    # ----- grids -----

    def _p_values(self):
        return index_range(self.plan['p_min'], self.plan['p_max'], self.plan['step'])

    def _q_values(self):
        return index_range(self.plan['q_min'], self.plan['q_max'], self.plan['step'])

    def _pair(self):
        return ExponentPair(self.plan['p'], self.plan['q'])

    # ----- commands -----

    def cmd_region(self):
        """Classify the (p, q) grid and compare with the torus region."""
        self.echo_plan(('p_min', 'p_max', 'q_min', 'q_max', 'step', 'families', 'deltas', 'scales', 'dim'))
        table = classify_region(
            self._p_values(), self._q_values(),
            families=self.plan['families'],
            threshold=self.plan['threshold'],
            boundary_margin=self.plan['boundary_margin'],
            n=self.plan['dim'],
            deltas=self.plan['deltas'],
            scales=self.plan['scales'],
            nodes=self.plan['nodes_per_circle'],
            workers=self.plan['workers'],
        )
        self.write_csv('region', [cell.csv_row() for cell in table.cells])
        self.write_plot('region', region_svg(table))

        counts = table.counts()
        summary = Table(title=f"Region classification (n={table.n})", header_style="bold cyan")
        summary.add_column("Status")
        summary.add_column("Cells", justify="right")
        summary.add_row(f"[green]{CONSISTENT}[/green]", str(counts[CONSISTENT]))
        summary.add_row(f"[red]{INADMISSIBLE}[/red]", str(counts[INADMISSIBLE]))
        summary.add_row(f"[dim]{BOUNDARY}[/dim]", str(counts[BOUNDARY]))
        if not self.quiet:
            err_console.print(summary)
        for cell in table.disagreements:
            self.info(f"[yellow]⚠️  Disagreement at {cell.pair}: {cell.status}[/yellow]")

        self.summary(agreement_line(table.agreement, len(table.disagreements)))
        return EXIT_OK if not table.disagreements else EXIT_DISAGREEMENT

    def _sweep_report(self, command, sweep):
        self.write_csv(command, sweep.csv_rows())
        self.write_plot(command, sweep_svg([sweep], f"{command} sweep {sweep.pair}"))
        rows = Table(title=f"{sweep.family} {sweep.pair} n={sweep.n}", header_style="bold cyan")
        rows.add_column(sweep.parameter, justify="right")
        rows.add_column("ratio", justify="right")
        for parameter, value in sweep.rows:
            rows.add_row(f"{parameter:g}", f"{value:.6g}")
        if not self.quiet:
            err_console.print(rows)
        self.info(f"[dim]blow-up slope {sweep.blowup_slope:.3f} (expected {sweep.expected_blowup:.3f})[/dim]")

        agrees = abs(sweep.slope - sweep.expected_slope) <= SLOPE_TOL
        residual = f"{sweep.residual:.3f}"
        self.summary(f"fitted {sweep.slope:.2f} expected {sweep.expected_slope:.2f} residual {residual}")
        if not agrees:
            self.info("[yellow]⚠️  Fitted slope differs from the prediction[/yellow]")
        return EXIT_OK if agrees else EXIT_DISAGREEMENT

    def cmd_knapp(self):
        """Knapp δ-sweep at one exponent pair."""
        self.echo_plan(('p', 'q', 'deltas', 'dim', 'nodes_per_circle'))
        sweep = knapp_sweep(self._pair(), self.plan['deltas'], n=self.plan['dim'],
                            nodes=self.plan['nodes_per_circle'])
        return self._sweep_report('knapp', sweep)

    def cmd_dilation(self):
        """Annular λ-sweep at one exponent pair."""
        self.echo_plan(('p', 'q', 'scales', 'dim'))
        sweep = dilation_p_probe(self._pair(), self.plan['scales'], n=self.plan['dim'])
        return self._sweep_report('dilation', sweep)

    def cmd_extension_tail(self):
        """Tail probe of the extension of the constant density."""
        self.echo_plan(('pprime', 'rmax', 'radii', 'dim', 'increment_tol', 'fit_residual_tol'))
        p_prime = self.plan['pprime']
        radii = self.plan['radii'] or default_radii(self.plan['rmax'])
        result = lp_tail_probe(
            float(p_prime), radii, n=self.plan['dim'],
            increment_tol=self.plan['increment_tol'],
            fit_residual_tol=self.plan['fit_residual_tol'],
        )
        self.write_csv('extension-tail', result.rows())
        self.info(
            f"[dim]increment exponent {result.increment_exponent:.3f}, "
            f"log-fit residual {result.fit_residual:.3f}, slope {result.slope:.3f}[/dim]"
        )
        expected = expected_growth(p_prime)
        self.summary(f"classification: {result.growth_class}")
        if expected is not None and expected != result.growth_class:
            self.info(f"[yellow]⚠️  Expected {expected} for p′={float(p_prime):g}[/yellow]")
            return EXIT_DISAGREEMENT
        return EXIT_OK

    def cmd_tensor_check(self):
        """Torus ratio of g⊗h against the product of circle ratios, random factors."""
        self.echo_plan(('p', 'q', 'trials', 'seed'))
        pair = self._pair()
        rng = np.random.default_rng(self.plan['seed'])
        nodes = self.plan['nodes_per_circle'] or 512
        rows = []
        worst = 0.0
        for trial in range(self.plan['trials']):
            g, h = random_planar_function(rng), random_planar_function(rng)
            report = tensor_factorization_report(g, h, pair, nodes=nodes)
            worst = max(worst, report['relative_error'])
            rows.append((trial, report['g'], report['h'], pair.p, pair.q,
                         report['ratio_torus'], report['ratio_product'], report['relative_error']))
        self.write_csv('tensor-check', rows)
        self.summary(f"max relative error {worst:.3e} over {len(rows)} trials")
        return EXIT_OK if worst < FACTORIZATION_TOL else EXIT_DISAGREEMENT

    def cmd_dimension_check(self):
        """Classify the same grid for several n and compare."""
        self.echo_plan(('dims', 'p_min', 'p_max', 'q_min', 'q_max', 'step', 'families'))
        report = dimension_independence(
            self.plan['dims'], self._p_values(), self._q_values(),
            families=self.plan['families'],
            threshold=self.plan['threshold'],
            boundary_margin=self.plan['boundary_margin'],
            deltas=self.plan['deltas'],
            scales=self.plan['scales'],
            workers=self.plan['workers'],
        )
        rows = []
        table = Table(title="Classification by dimension", header_style="bold cyan")
        table.add_column("n", justify="right")
        table.add_column("agreement", justify="right")
        table.add_column("torus cells", justify="right")
        table.add_column("S^{2n-1} cells", justify="right")
        for n, region in report.tables.items():
            for cell in region.cells:
                p, q = cell.pair.as_floats()
                rows.append((n, p, q, cell.status))
            p_values = sorted({c.pair.p for c in region.cells})
            q_values = sorted({c.pair.q for c in region.cells})
            counts = sphere_comparison(n, p_values, q_values)
            table.add_row(str(n), f"{region.agreement * 100:.0f}%", str(counts['torus']), str(counts['sphere']))
        self.write_csv('dimension-check', rows)
        if not self.quiet:
            err_console.print(table)

        dims = ','.join(str(n) for n in report.tables)
        if report.identical:
            self.summary(f"identical classification across n={dims}")
            return EXIT_OK
        self.summary(f"classification differs across n={dims} at {len(report.mismatches)} cells")
        return EXIT_DISAGREEMENT

    def cmd_minkowski(self):
        """Random-array Minkowski suite plus the partial-transform chain."""
        self.echo_plan(('p', 'q', 'trials', 'seed'))
        p, q = self.plan['p'], self.plan['q']
        rows = []
        failures = 0
        for trial, record in minkowski_trials(self.plan['trials'], p, q, seed=self.plan['seed']):
            rows.append((trial, p, q, record['lhs'], record['rhs'], record['holds']))
            failures += record['guaranteed'] and not record['holds']
        self.write_csv('minkowski', rows)

        chain = minkowski_chain(KnappTube(0.25), IsotropicGaussian(1.0, 2), ExponentPair(p, q))
        self.info(f"[dim]partial-transform chain: lhs {chain['lhs']:.6g} rhs {chain['rhs']:.6g}[/dim]")
        if q < p:
            self.info("[yellow]⚠️  q < p: the interchange inequality is not guaranteed[/yellow]")

        held = sum(1 for row in rows if row[-1])
        self.summary(f"minkowski holds in {held}/{len(rows)} trials")
        return EXIT_OK if failures == 0 else EXIT_DISAGREEMENT

    def cmd_bessel(self):
        """Surface quadrature of the circle extension against the J_0 series."""
        grid = TorusGrid(1, self.plan['nodes_per_circle'] or 256)
        rows = []
        worst = 0.0
        for r in (0.5, 1.0, 2.0, 5.0, 10.0):
            quadrature = extension_operator(constant_density, np.array([r, 0.0]), grid).real
            series = bessel_j0(2 * math.pi * r)
            error = abs(quadrature - series)
            worst = max(worst, error)
            rows.append((r, quadrature, series, error))
        self.write_csv('bessel', rows)

        zero = locate_first_zero()
        cross = abs(bessel_j0(100.0) - bessel_j0_series_mp(100.0))
        self.info(f"[dim]asymptotic vs extended series at r=100: {cross:.2e}[/dim]")
        ok = worst < BESSEL_TOL and abs(zero - FIRST_ZERO) < 1e-9 and cross < 1e-8
        self.summary(f"max abs error {worst:.2e}, first zero {zero:.15g}")
        return EXIT_OK if ok else EXIT_DISAGREEMENT

    def cmd_sphere_compare(self):
        """Cell counts of the torus region and the sphere S^{2n-1} conjecture region."""
        self.echo_plan(('dims', 'p_min', 'p_max', 'q_min', 'q_max', 'step'))
        rows = []
        table = Table(title="Torus vs sphere regions", header_style="bold cyan")
        for column in CSV_COLUMNS['sphere-compare']:
            table.add_column(column, justify="right")
        for n in self.plan['dims']:
            counts = sphere_comparison(n, self._p_values(), self._q_values())
            row = tuple(counts[c] for c in CSV_COLUMNS['sphere-compare'])
            rows.append(row)
            table.add_row(*(str(v) for v in row))
        self.write_csv('sphere-compare', rows)
        if not self.quiet:
            err_console.print(table)
        torus_counts = {row[2] for row in rows}
        self.summary(f"torus cells {'constant' if len(torus_counts) == 1 else 'varying'} across n")
        return EXIT_OK


def run(argv=None):
    """
    Parse arguments, resolve the plan and run one command.

    Returns:
        0 on success, 1 on usage/config/computation errors, 2 when a result
        disagrees with the predicted region or threshold
    """
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = vars(build_parser().parse_args(argv))
    except SystemExit as e:  # --help
        return EXIT_OK if not e.code else EXIT_ERROR
    except LabError as e:
        err_console.print(f"[red]Error:[/red] {e}")
        return EXIT_ERROR

    command = args.pop('command', None)
    config_path = args.pop('config', None)
    quiet = args.pop('quiet', False)
    try:
        plan = load_config(config_path, overrides=args)
        command = command or plan['experiment']
        cli = RestrictionLabCLI(plan, quiet=quiet)
        cli.info(f"[bold]restriction-lab {command}[/bold]")
        return cli.run(command)
    except LabError as e:
        err_console.print(f"[red]Error:[/red] {e}")
        return EXIT_ERROR


def main():
    """Entry point."""
    sys.exit(run())


if __name__ == '__main__':
    main()
