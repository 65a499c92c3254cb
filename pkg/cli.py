#!/usr/bin/env python3
"""
Cumulative Entropy Toolkit - Unified CLI

Provides a command-line interface for all toolkit operations:
  - entropy:   CRE, CE, WCRE, WCE by quadrature
  - series:    Truncated order-statistic series with a certified bracket
  - bounds:    Every moment bound evaluated on one distribution
  - table1:    Recompute the published table and report deltas
  - harter:    Standard normal comparison of series and symmetric bound
  - oracle:    Monte Carlo check of an extreme order-statistic moment
  - ingest:    Plug-in entropies of a sample file
  - reproduce: Run every published check
"""

import functools
import logging
import math
import sys
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

import click

from config.settings import Config
from core.exceptions import EntropyToolkitError
from utils.common import setup_utf8_output
from utils.export_formats import OutputRecord, render
from utils.logging_config import cleanup_old_logs, get_logger, setup_logging

logger = get_logger("cli")

MEASURES = ("cre", "ce", "wcre", "wce")
# Commands that narrate progress at INFO; the rest keep stdout/stderr quiet
NARRATING_COMMANDS = ("reproduce",)


def handle_toolkit_errors(func):
    """Map toolkit errors to a ✗ message on stderr and exit code 1."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (EntropyToolkitError, ArithmeticError) as e:
            logger.error(f"✗ {e}")
            sys.exit(1)

    return wrapper


def parse_measures(ctx, param, value):
    from processors.entropies import EntropyKind

    names = [name for name in value.split(",") if name.strip()]
    if not names:
        raise click.BadParameter("at least one measure is required")
    try:
        kinds = [EntropyKind.parse(name) for name in names]
    except ValueError as e:
        raise click.BadParameter(str(e))
    # Preserve order, drop repeats
    return list(dict.fromkeys(kinds))


def parse_truncation(ctx, param, value):
    if value is None or str(value).lower() == "auto":
        return None
    try:
        m = int(value)
    except ValueError:
        raise click.BadParameter(f"expected a positive integer or 'auto', got {value!r}")
    if m < 1:
        raise click.BadParameter(f"m must be >= 1, got {m}")
    return m


def emit(ctx, record: OutputRecord, failed: bool = False):
    """Write a record to stdout and exit 1 if it carries errors."""
    click.echo(render(record, ctx.obj['format']))
    if failed or not record.ok:
        sys.exit(1)


def load_spec(text: str):
    from core.distributions import parse_spec
    return parse_spec(text)


@click.group()
@click.option('--format', 'fmt', type=click.Choice(['json', 'csv']), default=Config.DEFAULT_FORMAT,
              help='Output format on stdout')
@click.option('--tol', type=click.FloatRange(min=0, min_open=True), default=Config.QUAD_ABS_TOL,
              help='Absolute quadrature tolerance')
@click.option('--seed', type=int, default=Config.MC_DEFAULT_SEED, help='Seed for Monte Carlo commands')
@click.option('--verbose', '-v', is_flag=True, help='Enable verbose/debug output')
@click.option('--log-file', is_flag=True, help='Also write a timestamped log file under logs/')
@click.pass_context
def cli(ctx, fmt, tol, seed, verbose, log_file):
    """Cumulative Entropy Toolkit.

    Computes cumulative residual entropy, cumulative entropy and their
    weighted variants by quadrature and by order-statistic series, and
    checks the moment bounds on them.
    """
    from core.quadrature import DEFAULT_TOLERANCE

    ctx.ensure_object(dict)
    ctx.obj['format'] = fmt
    ctx.obj['tol'] = DEFAULT_TOLERANCE.with_abs(tol)
    ctx.obj['seed'] = seed
    ctx.obj['verbose'] = verbose

    setup_utf8_output()
    console_level = logging.INFO if ctx.invoked_subcommand in NARRATING_COMMANDS else logging.WARNING
    setup_logging(verbose=verbose, log_prefix="cumentropy", banner_config=Config.BANNER_CONFIG,
                  log_to_file=log_file, console_level=console_level)

    # Clean up old logs
    cleanup_old_logs()


@cli.command()
@click.argument('dist_spec')
@click.option('--measures', '-m', default=",".join(MEASURES), callback=parse_measures,
              help='Comma-separated subset of cre,ce,wcre,wce')
@click.pass_context
@handle_toolkit_errors
def entropy(ctx, dist_spec, measures):
    """Compute cumulative entropies by quadrature.

    \b
    Examples:
      python cli.py entropy "exp(lambda=1)"
      python cli.py entropy "uniform(a=1)" --measures wcre
      python cli.py --format csv entropy table1:row4 -m cre,ce
    """
    from processors.entropies import entropy as compute_entropy

    dist = load_spec(dist_spec)
    record = OutputRecord(command="entropy",
                          inputs={"dist": dist.label, "measures": [k.value for k in measures],
                                  "tol": ctx.obj['tol'].abs_tol})

    for kind in measures:
        try:
            result = compute_entropy(dist, kind, ctx.obj['tol'])
        except EntropyToolkitError as e:
            record.errors[kind.value] = str(e)
            logger.warning(f"✗ {dist.label}: {kind.value} failed: {e}")
            continue
        record.results[kind.value] = result.value
        record.results[f"{kind.value}_error_estimate"] = result.error_estimate
        record.warnings.extend(result.warnings)

    emit(ctx, record)


@cli.command()
@click.argument('dist_spec')
@click.argument('measure', type=click.Choice(list(MEASURES) + ['sum']))
@click.option('--m', 'm', default='auto', callback=parse_truncation,
              help="Truncation index, or 'auto' for the smallest m reaching --width")
@click.option('--width', type=click.FloatRange(min=0, min_open=True), default=Config.SERIES_DEFAULT_WIDTH,
              help='Target bracket width when --m auto')
@click.option('--m-max', type=click.IntRange(min=1), default=Config.SERIES_M_MAX,
              help='Largest m tried when --m auto')
@click.option('--terms-out', type=click.Path(dir_okay=False), default=None,
              help='Write the per-term ledger (n, moment, weight, term) as CSV')
@click.pass_context
@handle_toolkit_errors
def series(ctx, dist_spec, measure, m, width, m_max, terms_out):
    """Truncated order-statistic series with a certified bracket.

    MEASURE is one of cre, ce, wcre, wce, or sum (the CRE + CE identity).

    \b
    Examples:
      python cli.py series "exp(lambda=1)" cre --m 3
      python cli.py series "uniform(a=1)" ce --width 0.01
      python cli.py series table1:row5 wce --terms-out output/data/ledger.csv
    """
    from processors.series import converge, series as truncated_series
    from utils.file_io import save_csv

    dist = load_spec(dist_spec)
    if m is None:
        approx = converge(dist, measure, width, m_max)
    else:
        approx = truncated_series(dist, measure, m)

    record = OutputRecord(command="series",
                          inputs={"dist": dist.label, "measure": measure,
                                  "m": "auto" if m is None else m, "width": width, "m_max": m_max},
                          results=approx.summary(), warnings=list(approx.warnings))

    if terms_out:
        rows = [{"n": n, "moment": moment, "weight": weight, "term": term}
                for n, moment, weight, term in approx.ledger()]
        save_csv(rows, Path(terms_out), fieldnames=["n", "moment", "weight", "term"])
        logger.info(f"✓ Ledger written to {terms_out}")

    emit(ctx, record)


@cli.command()
@click.argument('dist_spec')
@click.option('--sample-size', '-n', type=click.IntRange(min=2), default=Config.REPORT_SAMPLE_SIZE,
              help='Sample size for the extreme-mean bounds')
@click.pass_context
@handle_toolkit_errors
def bounds(ctx, dist_spec, sample_size):
    """Evaluate every bound on one distribution.

    \b
    Examples:
      python cli.py bounds table1:row4
      python cli.py bounds "exp(lambda=1)"
      python cli.py --format csv bounds "uniform(a=2)" -n 10
    """
    from analytics.bounds import check_all

    dist = load_spec(dist_spec)
    report = check_all(dist, ctx.obj['tol'], sample_size)

    entries = {}
    for e in report.entries:
        entries[e.name] = {
            "applicable": e.applicable,
            "direction": e.direction,
            "bound": e.bound_value,
            "measured": e.measured_value,
            "satisfied": e.satisfied,
            "slack": e.slack,
        }
        if e.error is not None:
            # Per-entry failures do not abort the report
            logger.warning(f"✗ {dist.label}: {e.name}: {e.error}")

    record = OutputRecord(command="bounds",
                          inputs={"dist": dist.label, "sample_size": sample_size,
                                  "distribution": report.distribution},
                          results={"measured": report.measured, "entries": entries},
                          warnings=list(report.warnings),
                          errors={e.name: e.error for e in report.entries if e.error is not None})
    emit(ctx, record)


@cli.command()
@click.option('--workers', '-w', type=click.IntRange(min=1), default=Config.TABLE1_WORKERS,
              help='Number of parallel row workers')
@click.option('--xlsx', type=click.Path(dir_okay=False), default=None,
              help='Also write the table as an Excel workbook')
@click.pass_context
@handle_toolkit_errors
def table1(ctx, workers, xlsx):
    """Recompute Table 1 and report deltas against the published cells.

    Exits 1 if any cell is outside tolerance.

    \b
    Examples:
      python cli.py table1
      python cli.py --format csv table1
      python cli.py table1 --xlsx output/exports/table1.xlsx
    """
    from generators.table1_generator import Table1Generator
    from utils.export_formats import generate_table1_excel, render_table1_csv

    table = Table1Generator(tol=ctx.obj['tol'], workers=workers).generate_all()
    failed = not table.all_within_tolerance

    if xlsx:
        generate_table1_excel(table, Path(xlsx))

    if ctx.obj['format'] == 'csv':
        click.echo(render_table1_csv(table), nl=False)
        if failed:
            sys.exit(1)
        return

    record = OutputRecord(command="table1", inputs={"workers": workers, "tol": ctx.obj['tol'].abs_tol},
                          warnings=table.warnings, deltas={})
    for row in table.rows:
        key = f"row{row.row}"
        if row.error is not None:
            record.errors[key] = row.error
            continue
        record.results[key] = dict(row.computed, within_tolerance=row.within_tolerance)
        record.deltas[key] = dict(row.deltas)
    emit(ctx, record, failed=failed)


@cli.command()
@click.option('--m', 'm', type=click.IntRange(min=1), default=Config.HARTER_DEFAULT_M,
              help='Number of series terms')
@click.pass_context
@handle_toolkit_errors
def harter(ctx, m):
    """Standard normal: series sum against the symmetric bound sum.

    \b
    Examples:
      python cli.py harter
      python cli.py harter --m 1
    """
    from processors.order_stats import harter_comparison

    comparison = harter_comparison(m)
    record = OutputRecord(command="harter", inputs={"m": m},
                          results={"series_sum": comparison.series_sum,
                                   "bound_sum": comparison.bound_sum,
                                   "holds": comparison.holds})
    emit(ctx, record)


@cli.command()
@click.argument('dist_spec')
@click.argument('which', type=click.Choice(['smallest', 'largest']))
@click.argument('n', type=click.IntRange(min=1))
@click.option('--order', type=click.IntRange(1, 2), default=1, help='Moment order (1 or 2)')
@click.option('--samples', type=click.IntRange(min=1), default=Config.MC_DEFAULT_SAMPLES,
              help='Number of Monte Carlo draws')
@click.option('--workers', '-w', type=click.IntRange(min=1), default=1, help='Number of sampling threads')
@click.option('--dump', type=click.Path(dir_okay=False), default=None,
              help='Write draws of the parent law in sample-file format')
@click.pass_context
@handle_toolkit_errors
def oracle(ctx, dist_spec, which, n, order, samples, workers, dump):
    """Monte Carlo estimate of an extreme moment against its reference value.

    \b
    Examples:
      python cli.py oracle "uniform(a=1)" largest 2
      python cli.py --seed 7 oracle "exp(lambda=1)" smallest 3
      python cli.py oracle "exp(lambda=1)" largest 1 --samples 100000 --dump output/data/exp.txt
    """
    from processors.order_stats import extreme_moment, mc_extreme_estimate, sample_parent
    from utils.file_io import save_samples

    dist = load_spec(dist_spec)
    seed = ctx.obj['seed']
    estimate = mc_extreme_estimate(dist, which, n, order, samples, seed, workers)

    record = OutputRecord(command="oracle",
                          inputs={"dist": dist.label, "which": which, "n": n, "order": order,
                                  "samples": samples, "seed": seed},
                          results={"estimate": estimate.value, "std_error": estimate.std_error})
    try:
        reference = extreme_moment(dist, which, n, order, ctx.obj['tol'])
    except EntropyToolkitError as e:
        record.errors["reference"] = str(e)
    else:
        if estimate.std_error > 0:
            z = (estimate.value - reference.value) / estimate.std_error
        else:
            z = 0.0 if estimate.value == reference.value else math.inf
        record.results.update({
            "reference": reference.value,
            "reference_method": reference.method,
            "z_score": z,
            "within_limit": abs(z) <= Config.MC_Z_LIMIT,
        })
        if abs(z) > Config.MC_Z_LIMIT:
            record.warnings.append(f"|z| = {abs(z):.2f} exceeds {Config.MC_Z_LIMIT}")

    if dump:
        values = sample_parent(dist, samples, seed)
        save_samples(values, Path(dump), header=f"{dist.label} samples={samples} seed={seed}")
        logger.info(f"✓ {samples} draws written to {dump}")

    emit(ctx, record)


@cli.command()
@click.argument('path', type=click.Path(dir_okay=False))
@click.option('--measures', '-m', default=",".join(MEASURES), callback=parse_measures,
              help='Comma-separated subset of cre,ce,wcre,wce')
@click.pass_context
@handle_toolkit_errors
def ingest(ctx, path, measures):
    """Plug-in entropies of a sample file (one non-negative value per line).

    \b
    Examples:
      python cli.py ingest data.txt
      python cli.py ingest data.txt --measures cre,ce
    """
    from core.distributions import empirical_from_samples
    from processors.entropies import empirical_plugin
    from utils.file_io import load_samples

    values = load_samples(Path(path))
    dist = empirical_from_samples(values)
    record = OutputRecord(command="ingest",
                          inputs={"path": str(path), "measures": [k.value for k in measures]},
                          results={"samples": len(values), "distinct": len(set(values))})
    for kind in measures:
        result = empirical_plugin(dist, kind)
        record.results[kind.value] = result.value
        record.warnings.extend(result.warnings)

    emit(ctx, record)


@cli.command()
@click.option('--workers', '-w', type=click.IntRange(min=1), default=Config.TABLE1_WORKERS,
              help='Number of parallel Table 1 workers')
@click.option('--save', is_flag=True, help='Write a JSON summary under output/')
@click.option('--dry-run', is_flag=True, help='Show what would be executed without running')
@click.pass_context
def reproduce(ctx, workers, save, dry_run):
    """Run every published check and print a summary.

    \b
    Examples:
      python cli.py reproduce
      python cli.py reproduce --workers 1 --save
      python cli.py -v reproduce
    """
    from orchestrator import ReproductionOrchestrator

    if dry_run:
        logger.info("[DRY-RUN] Would execute reproduction with:")
        logger.info(f"  tol={ctx.obj['tol'].abs_tol}")
        logger.info(f"  workers={workers}")
        logger.info(f"  save={save}")
        return

    orchestrator = ReproductionOrchestrator(tol=ctx.obj['tol'], workers=workers, write_outputs=save)
    success = orchestrator.run_full_pipeline()
    sys.exit(0 if success else 1)


if __name__ == '__main__':
    cli()
