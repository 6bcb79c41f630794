import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Set, Tuple

import pandas as pd

from .config_loader import DEFAULT_BOUNDS
from .errors import ConfigError, FieldFailure, RelclassError
from .exporter.result_cache import ResultCache, ResultLine
from .numtheory.dirichlet import FieldOrbit, characters_of_exact_order, galois_orbits
from .numtheory.relclass import DEFAULT_ORACLE_GUARD, HMinusRecord, h_minus
from .numtheory.splitting import theorem_mechanism_check
from .numtheory.unit_group import decompose_unit_group
from .utils.logging_utils import log_performance
from .utils.math_utils import DEFAULT_TRIAL_LIMIT, is_two_power

COROLLARY_VALUES = (1, 2, 4, 8, 16)
COROLLARY_NOTE = "h+ in {1, 2, 4} per published tables (not computed here)"


@dataclass
class ScanConfig:
    """
    Attributes:
        max_conductor: Largest conductor scanned
        degrees: Field degrees 2n, each a power of 2 that is at least 4
        a_max: Largest exponent a reported in the B_a table
        parallel_workers: Worker processes (1 runs inline)
        resume_from: Result cache to replay and append to
        oracle_guard: Largest tolerated |oracle - h^-|
        trial_limit: Factor search budget for the mechanism check
        bounds: Published conductor bounds B_a to compare against
    """
    max_conductor: int
    degrees: List[int]
    a_max: int = 0
    parallel_workers: int = 1
    resume_from: Optional[Path] = None
    oracle_guard: float = DEFAULT_ORACLE_GUARD
    trial_limit: int = DEFAULT_TRIAL_LIMIT
    bounds: Dict[int, int] = field(default_factory=lambda: dict(DEFAULT_BOUNDS))

    def __post_init__(self):
        self.degrees = sorted(set(self.degrees))
        if self.max_conductor < 0:
            raise ConfigError(f"max_conductor must be non-negative, got {self.max_conductor}")
        if not self.degrees:
            raise ConfigError("At least one degree is required")
        for degree in self.degrees:
            if not is_two_power(degree) or degree < 4:
                raise ConfigError(f"Degree must be a power of 2 that is at least 4, got {degree}")
        if self.a_max < 0:
            raise ConfigError(f"a_max must be non-negative, got {self.a_max}")
        if self.parallel_workers < 1:
            raise ConfigError(f"parallel_workers must be positive, got {self.parallel_workers}")
        if self.resume_from is not None:
            self.resume_from = Path(self.resume_from)


@dataclass(frozen=True)
class Violation:
    conductor: int
    degree: int
    label: str
    h_minus: int
    primes: Tuple[int, ...]


@dataclass(frozen=True)
class CorollaryCandidate:
    conductor: int
    degree: int
    label: str
    h_minus: int
    note: str = COROLLARY_NOTE


@dataclass
class ScanReport:
    """
    Outcome of a scan.

    records holds the fields computed in this run; lines holds every field
    in range, cached ones included, sorted by (conductor, degree, label).
    """
    max_conductor: int
    degrees: List[int]
    records: List[HMinusRecord] = field(default_factory=list)
    lines: List[ResultLine] = field(default_factory=list)
    violations: List[Violation] = field(default_factory=list)
    ba_table: Dict[int, Optional[int]] = field(default_factory=dict)
    ba_verdicts: Dict[int, str] = field(default_factory=dict)
    corollary_candidates: List[CorollaryCandidate] = field(default_factory=list)
    cached_conductors: int = 0
    bounds: Dict[int, int] = field(default_factory=lambda: dict(DEFAULT_BOUNDS))

    @property
    def max_h_minus(self) -> Optional[int]:
        return max((int(line.h_minus) for line in self.lines), default=None)

    def to_document(self) -> Dict:
        """Timestamp-free view; equal scans give equal documents."""
        return {
            'max_conductor': self.max_conductor,
            'degrees': self.degrees,
            'fields': [
                {k: v for k, v in asdict(line).items() if k != 'timestamp'}
                for line in self.lines
            ],
            'violations': [asdict(v) for v in self.violations],
            'ba_table': {str(a): c for a, c in self.ba_table.items()},
            'ba_verdicts': {str(a): v for a, v in self.ba_verdicts.items()},
            'corollary_candidates': [asdict(c) for c in self.corollary_candidates],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_document(), sort_keys=True, indent=2)

    def summary_frame(self) -> pd.DataFrame:
        rows = []
        for degree in self.degrees:
            lines = [line for line in self.lines if line.degree == degree]
            rows.append({
                'degree': degree,
                'fields': len(lines),
                'max_h_minus': max((int(line.h_minus) for line in lines), default=0),
                'corollary_candidates': sum(
                    1 for c in self.corollary_candidates if c.degree == degree
                ),
                'violations': sum(1 for v in self.violations if v.degree == degree),
            })
        return pd.DataFrame(
            rows, columns=['degree', 'fields', 'max_h_minus', 'corollary_candidates', 'violations']
        )

    def ba_frame(self) -> pd.DataFrame:
        rows = [
            {
                'a': a,
                'largest_conductor': self.ba_table[a],
                'published_bound': self.bounds.get(a),
                'verdict': self.ba_verdicts.get(a, ''),
            }
            for a in sorted(self.ba_table)
        ]
        return pd.DataFrame(rows, columns=['a', 'largest_conductor', 'published_bound', 'verdict'])


def enumerate_fields(max_conductor: int, two_n: int) -> Iterator[FieldOrbit]:
    """
    One orbit per imaginary cyclic field of degree 2n and conductor <= max_conductor.

    Conductors 2 mod 4 carry no primitive characters and are skipped.
    """
    for f in range(3, max_conductor + 1):
        if f % 4 == 2:
            continue
        yield from galois_orbits(characters_of_exact_order(f, two_n, True, True))


def _scan_conductor(task: Tuple[int, Tuple[int, ...], float, int]) -> Tuple[int, Tuple[int, ...], List[HMinusRecord]]:
    """Every field of conductor f in the given degrees. Runs in a worker."""
    f, degrees, oracle_guard, trial_limit = task
    group = decompose_unit_group(f)
    records = []
    for degree in degrees:
        chars = characters_of_exact_order(f, degree, True, True, group=group)
        for orbit in galois_orbits(chars):
            try:
                records.append(h_minus(orbit, oracle_guard=oracle_guard, trial_limit=trial_limit))
            except RelclassError as e:
                raise FieldFailure(
                    f"Field {orbit.label} (conductor {f}, degree {degree}): "
                    f"{type(e).__name__}: {e}",
                    conductor=f, degree=degree, label=orbit.label,
                ) from e
    return f, degrees, records


def corollary_filter(report: ScanReport) -> List[CorollaryCandidate]:
    """Fields with h^- in {1, 2, 4, 8, 16}."""
    return [
        CorollaryCandidate(
            conductor=line.conductor,
            degree=line.degree,
            label=line.label,
            h_minus=int(line.h_minus),
        )
        for line in report.lines
        if int(line.h_minus) in COROLLARY_VALUES
    ]


def ba_table(lines: List[ResultLine], a_max: int) -> Dict[int, Optional[int]]:
    """For each a <= a_max, the largest conductor with h^- dividing 2**a."""
    table: Dict[int, Optional[int]] = {}
    for a in range(a_max + 1):
        conductors = [
            line.conductor for line in lines
            if (1 << a) % int(line.h_minus) == 0
        ]
        table[a] = max(conductors, default=None)
    return table


def ba_verdicts(table: Dict[int, Optional[int]], max_conductor: int,
                bounds: Dict[int, int] = DEFAULT_BOUNDS) -> Dict[int, str]:
    """The scan is evidence for a bound within its range, never a proof of it."""
    verdicts = {}
    for a, largest in table.items():
        bound = bounds.get(a)
        if bound is None:
            verdicts[a] = "no published bound"
        elif largest is not None and largest > bound:
            verdicts[a] = f"exceeds published bound {bound}"
        elif max_conductor < bound:
            verdicts[a] = f"consistent within scanned range (scan stops below {bound})"
        else:
            verdicts[a] = "consistent within scanned range"
    return verdicts


class Scanner:
    def __init__(self, config: ScanConfig, logger: logging.Logger,
                 cache: Optional[ResultCache] = None):
        self.config = config
        self.logger = logger
        if cache is None and config.resume_from is not None:
            cache = ResultCache(config.resume_from, logger)
        self.cache = cache

    def _pending_tasks(self, completed: Dict[int, Set[int]]) -> Tuple[List[Tuple], int]:
        tasks, cached = [], 0
        for f in range(3, self.config.max_conductor + 1):
            if f % 4 == 2:
                continue
            degrees = tuple(d for d in self.config.degrees if f not in completed.get(d, set()))
            if not degrees:
                cached += 1
                continue
            tasks.append((f, degrees, self.config.oracle_guard, self.config.trial_limit))
        return tasks, cached

    def _results(self, tasks: List[Tuple]) -> Iterator[Tuple[int, Tuple[int, ...], List[HMinusRecord]]]:
        if self.config.parallel_workers == 1 or len(tasks) < 2:
            for task in tasks:
                yield _scan_conductor(task)
            return
        chunksize = max(1, len(tasks) // (self.config.parallel_workers * 8))
        with ProcessPoolExecutor(max_workers=self.config.parallel_workers) as executor:
            # map() yields in submission order, so the cache sees conductors ascending.
            yield from executor.map(_scan_conductor, tasks, chunksize=chunksize)

    @log_performance
    def run(self) -> ScanReport:
        """Scan every conductor in range, skipping work the cache already holds."""
        config = self.config
        self.logger.info(
            f"Starting scan: max_conductor={config.max_conductor}, degrees={config.degrees}, "
            f"workers={config.parallel_workers}"
        )

        completed: Dict[int, Set[int]] = {}
        cached_lines: List[ResultLine] = []
        if self.cache is not None:
            completed = self.cache.completed()
            cached_lines = [
                line for line in self.cache.replay()
                if line.conductor <= config.max_conductor and line.degree in config.degrees
            ]

        tasks, cached = self._pending_tasks(completed)
        if cached:
            self.logger.warning(f"Skipping {cached} conductors already in the cache")
        if not tasks and cached:
            self.logger.info("All conductors cached")

        records: List[HMinusRecord] = []
        new_lines: List[ResultLine] = []
        try:
            for f, degrees, conductor_records in self._results(tasks):
                lines = [ResultLine.from_record(r) for r in conductor_records]
                if self.cache is not None:
                    self.cache.append_conductor(f, degrees, lines)
                records.extend(conductor_records)
                new_lines.extend(lines)
                self.logger.debug(f"Conductor {f}: {len(conductor_records)} fields")
        except FieldFailure as e:
            self.logger.error(f"Scan aborted: {e}")
            raise

        report = ScanReport(
            max_conductor=config.max_conductor,
            degrees=list(config.degrees),
            records=records,
            lines=sorted(cached_lines + new_lines, key=lambda line: line.sort_key),
            cached_conductors=cached,
            bounds=dict(config.bounds),
        )
        report.violations = self._violations(report)
        report.ba_table = ba_table(report.lines, config.a_max)
        report.ba_verdicts = ba_verdicts(report.ba_table, config.max_conductor, config.bounds)
        report.corollary_candidates = corollary_filter(report)

        self.logger.info(
            f"Scan finished: {len(report.lines)} fields ({len(records)} computed), "
            f"{len(report.violations)} violations"
        )
        return report

    def _violations(self, report: ScanReport) -> List[Violation]:
        computed = {(r.conductor, r.degree, r.label): r for r in report.records}
        violations = []
        for line in report.lines:
            record = computed.get(line.sort_key)
            if record is not None:
                primes = record.mechanism_violations
            elif line.mechanism_ok:
                continue
            else:
                primes = tuple(theorem_mechanism_check(int(line.h_minus), line.degree,
                                                       self.config.trial_limit))
            if primes:
                violations.append(Violation(
                    conductor=line.conductor,
                    degree=line.degree,
                    label=line.label,
                    h_minus=int(line.h_minus),
                    primes=tuple(primes),
                ))
        return violations


def run_scan(config: ScanConfig, logger: Optional[logging.Logger] = None,
             cache: Optional[ResultCache] = None) -> ScanReport:
    return Scanner(config, logger or logging.getLogger('cyclic_relclass'), cache).run()
