import sys
import time
from pathlib import Path
from typing import List, Optional

import click
from dotenv import load_dotenv

from .config_loader import Config
from .errors import ConfigError, NoSuchField, RelclassError, UnknownFormat
from .exporter.csv_exporter import CSVExporter
from .exporter.json_exporter import JSONExporter
from .exporter.result_cache import ResultCache
from .fetch.number_field_db import NumberFieldDBClient
from .numtheory.dirichlet import characters_of_exact_order, galois_orbits
from .numtheory.relclass import HMinusRecord, h_minus
from .numtheory.splitting import splitting_report
from .pipeline import ScanConfig, Scanner
from .utils.logging_utils import setup_logger
from .utils.time_utils import format_duration

EXPORT_FORMATS = ('csv', 'json-doc')


def _parse_degrees(degrees: str) -> List[int]:
    try:
        return [int(d) for d in degrees.split(',') if d.strip()]
    except ValueError:
        raise ConfigError(f"Degrees must be comma-separated integers, got {degrees!r}")


def _exit_on_error(ctx: click.Context, e: Exception) -> None:
    logger = ctx.obj['logger']
    if isinstance(e, RelclassError):
        logger.error(f"{type(e).__name__}: {e}")
        click.echo(f"Error: {e}", err=True)
        sys.exit(e.exit_code)
    logger.error(f"I/O error: {e}")
    click.echo(f"Error: {e}", err=True)
    sys.exit(1)


def _print_record(record: HMinusRecord) -> None:
    eq4 = 'n/a' if record.eq4_checked is None else ('ok' if record.eq4_checked else 'FAILED')
    click.echo(f"Field {record.label} (Conrey {record.orbit.conrey_label})")
    click.echo(f"  conductor      {record.conductor}")
    click.echo(f"  degree         {record.degree}")
    click.echo(f"  w              {record.w}")
    click.echo(f"  Q              {record.q}")
    click.echo(f"  w*L(0,chi)     {record.scaled_l_value}")
    click.echo(f"  norm           {record.norm_value}")
    click.echo(f"  h_minus        {record.h_minus}")
    click.echo(f"  h_minus = 2^{record.two_adic_exponent} * {record.odd_part}"
               f" (odd part squarefree: {record.odd_part_squarefree})")
    click.echo(f"  oracle         {record.oracle_float:.9f}")
    click.echo(f"  eq2_ok         {record.eq2_ok}")
    click.echo(f"  eq4            {eq4}")
    click.echo(f"  oracle_ok      {record.oracle_ok}")
    click.echo(f"  mechanism_ok   {record.mechanism_ok}")


@click.group()
@click.option(
    '--config',
    type=click.Path(),
    default='config.yaml',
    help='Path to configuration file (defaults apply if missing)'
)
@click.option('--verbose', '-v', is_flag=True, help='Enable verbose logging')
@click.option('--log-file', type=click.Path(), help='Also write logs to this file')
@click.pass_context
def main(ctx: click.Context, config: str, verbose: bool, log_file: Optional[str]):
    """
    Relative class numbers of imaginary cyclic fields of 2-power degree.

    Computes h^- exactly in Z[zeta_2n], checks it against the analytic
    formula, and scans conductor ranges for the square-divisibility
    pattern of odd primes p != 1 mod 2n.
    """
    load_dotenv()
    logger = setup_logger(verbose, log_file)
    explicit = ctx.get_parameter_source('config') != click.core.ParameterSource.DEFAULT
    try:
        config_obj = Config(config, required=explicit)
    except ConfigError as e:
        click.echo(f"Error: {e}", err=True)
        sys.exit(e.exit_code)
    ctx.obj = {'config': config_obj, 'logger': logger}


@main.command('hminus')
@click.argument('conductor', type=int)
@click.argument('degree', type=int)
@click.pass_context
def hminus_cmd(ctx: click.Context, conductor: int, degree: int):
    """Exact h^- of every imaginary cyclic field with this conductor and degree."""
    config: Config = ctx.obj['config']
    try:
        orbits = galois_orbits(characters_of_exact_order(conductor, degree, True, True))
        if not orbits:
            raise NoSuchField(
                f"No primitive odd character of order {degree} has conductor {conductor}"
            )
        for orbit in orbits:
            record = h_minus(orbit, oracle_guard=config.oracle_guard, trial_limit=config.trial_limit)
            _print_record(record)
    except (RelclassError, OSError) as e:
        _exit_on_error(ctx, e)


@main.command('scan')
@click.option('--max-conductor', type=int, help='Largest conductor to scan')
@click.option('--degrees', type=str, help='Comma-separated degrees (e.g. "4,8,16")')
@click.option('--a-max', type=int, help='Largest exponent a in the B_a table')
@click.option('--workers', type=int, help='Worker processes')
@click.option('--cache', 'cache_path', type=click.Path(), help='Result cache (default: RELCLASS_CACHE)')
@click.pass_context
def scan_cmd(ctx: click.Context, max_conductor: Optional[int], degrees: Optional[str],
             a_max: Optional[int], workers: Optional[int], cache_path: Optional[str]):
    """Scan all fields up to a conductor bound, caching results for resume."""
    config: Config = ctx.obj['config']
    logger = ctx.obj['logger']
    try:
        scan_config = ScanConfig(
            max_conductor=max_conductor if max_conductor is not None else config.max_conductor,
            degrees=_parse_degrees(degrees) if degrees else config.degrees,
            a_max=a_max if a_max is not None else config.a_max,
            parallel_workers=workers if workers is not None else config.workers,
            resume_from=Path(cache_path or config.cache_path),
            oracle_guard=config.oracle_guard,
            trial_limit=config.trial_limit,
            bounds=config.published_bounds,
        )
        logger.info(f"Result cache: {scan_config.resume_from}")

        start = time.monotonic()
        report = Scanner(scan_config, logger).run()
        elapsed = time.monotonic() - start

        click.echo(f"Scanned conductors <= {report.max_conductor}, degrees {report.degrees} "
                   f"in {format_duration(elapsed)}")
        if report.cached_conductors:
            click.echo(f"Conductors replayed from cache: {report.cached_conductors}")
        click.echo(report.summary_frame().to_string(index=False))
        click.echo("")
        click.echo(report.ba_frame().to_string(index=False))
        click.echo("")
        click.echo(f"fields: {len(report.lines)}  max h_minus: {report.max_h_minus}  "
                   f"violations: {len(report.violations)}")
        for violation in report.violations:
            click.echo(f"  VIOLATION {violation.label}: h_minus={violation.h_minus} "
                       f"primes={list(violation.primes)}")
    except (RelclassError, OSError) as e:
        _exit_on_error(ctx, e)


@main.command('splitting')
@click.argument('p', type=int)
@click.argument('degree', type=int)
@click.pass_context
def splitting_cmd(ctx: click.Context, p: int, degree: int):
    """How the odd prime P splits in Q(zeta_DEGREE)."""
    try:
        report = splitting_report(p, degree)
    except RelclassError as e:
        _exit_on_error(ctx, e)
        return
    degrees = ', '.join(str(d) for d in report.factor_degrees)
    click.echo(f"p = {report.p}, 2n = {report.two_n}")
    click.echo(f"  order of p mod 2n   {report.order_f}")
    click.echo(f"  factor degrees      {{{degrees}}}")
    click.echo(f"  primes above p      {report.prime_count}")
    click.echo(f"  consistent          {report.consistent}")


@main.command('export')
@click.option('--cache', 'cache_path', type=click.Path(), help='Result cache (default: RELCLASS_CACHE)')
@click.option('--format', 'fmt', type=str, default='csv', help='csv or json-doc')
@click.option('--output', type=click.Path(), help='Output file (default: next to the cache)')
@click.pass_context
def export_cmd(ctx: click.Context, cache_path: Optional[str], fmt: str, output: Optional[str]):
    """Export the result cache as CSV or as one JSON document."""
    config: Config = ctx.obj['config']
    logger = ctx.obj['logger']
    try:
        if fmt not in EXPORT_FORMATS:
            raise UnknownFormat(f"Unknown format {fmt!r}; expected one of {', '.join(EXPORT_FORMATS)}")
        path = Path(cache_path or config.cache_path)
        if not path.exists():
            raise ConfigError(f"Cache not found: {path}")

        lines = ResultCache(path, logger).replay()
        if fmt == 'csv':
            exporter = CSVExporter(output or path.with_suffix('.csv'))
        else:
            exporter = JSONExporter(output or path.with_suffix('.json'))
        written = exporter.export(lines)
        logger.info(f"Exported {len(lines)} fields")
        click.echo(f"Results saved to: {written}")
    except (RelclassError, OSError) as e:
        _exit_on_error(ctx, e)


@main.command('crosscheck')
@click.option('--cache', 'cache_path', type=click.Path(), help='Result cache (default: RELCLASS_CACHE)')
@click.option('--endpoint', type=str, help='Number-field database endpoint URL')
@click.pass_context
def crosscheck_cmd(ctx: click.Context, cache_path: Optional[str], endpoint: Optional[str]):
    """Compare cached h^- values with a public number-field database."""
    config: Config = ctx.obj['config']
    logger = ctx.obj['logger']
    try:
        path = Path(cache_path or config.cache_path)
        lines = ResultCache(path, logger).replay()
        settings = config.crosscheck_settings
        client = NumberFieldDBClient(
            endpoint or config.endpoint,
            logger,
            rate_limit_delay=settings.get('rate_limit_delay'),
            timeout=settings.get('timeout'),
            max_retries=settings.get('max_retries'),
        )
        results = client.crosscheck(lines)
    except (RelclassError, OSError) as e:
        _exit_on_error(ctx, e)
        return

    for result in results:
        click.echo(f"{result.local_label}\t{result.remote_identifier or '-'}\t"
                   f"{result.remote_h_minus or '-'}\t{result.match}")
    click.echo(f"checked: {len(results)}  matched: {sum(1 for r in results if r.match is True)}  "
               f"unavailable: {sum(1 for r in results if r.match == 'unavailable')}")


if __name__ == '__main__':
    main()
