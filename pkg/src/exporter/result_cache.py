import hashlib
import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Set, Tuple, Union

from ..errors import CacheCorrupted
from ..numtheory.relclass import HMinusRecord
from ..utils.time_utils import utc_timestamp

SCHEMA_VERSION = 1


def line_checksum(payload: Dict[str, Any]) -> str:
    """First 16 hex digits of SHA-256 over the canonical JSON of a line."""
    canonical = json.dumps(payload, sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()[:16]


@dataclass(frozen=True)
class ResultLine:
    """One cached field orbit. h_minus is a decimal string of any length."""
    conductor: int
    degree: int
    label: str
    conrey_label: str
    w: int
    q: int
    h_minus: str
    eq2_ok: bool
    eq4_ok: Union[bool, str]
    oracle_ok: bool
    mechanism_ok: bool
    timestamp: str
    schema_version: int = SCHEMA_VERSION

    @classmethod
    def from_record(cls, record: HMinusRecord, timestamp: Optional[str] = None) -> "ResultLine":
        return cls(
            conductor=record.conductor,
            degree=record.degree,
            label=record.label,
            conrey_label=record.orbit.conrey_label,
            w=record.w,
            q=record.q,
            h_minus=str(record.h_minus),
            eq2_ok=record.eq2_ok,
            eq4_ok='n/a' if record.eq4_checked is None else bool(record.eq4_checked),
            oracle_ok=record.oracle_ok,
            mechanism_ok=record.mechanism_ok,
            timestamp=timestamp or utc_timestamp(),
        )

    @property
    def sort_key(self) -> Tuple[int, int, str]:
        return (self.conductor, self.degree, self.label)

    @property
    def all_checks_ok(self) -> bool:
        return self.eq2_ok and self.eq4_ok in (True, 'n/a') and self.oracle_ok and self.mechanism_ok

    def to_payload(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload['kind'] = 'field'
        return payload


class ResultCache:
    """
    Append-only line-delimited JSON cache of scan results.

    Field lines hold one ResultLine each; checkpoint lines mark a conductor
    as finished for a set of degrees. Every line carries a checksum and
    replay refuses the whole file if any line fails it.
    """

    def __init__(self, path: Union[str, Path], logger: Optional[logging.Logger] = None):
        self.path = Path(path)
        self.logger = logger or logging.getLogger('cyclic_relclass')

    def append_conductor(self, conductor: int, degrees: Iterable[int],
                         lines: Iterable[ResultLine]) -> None:
        """Write a conductor's field lines followed by its checkpoint, then flush."""
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._drop_unfinished_tail()
        payloads = [line.to_payload() for line in lines]
        payloads.append({
            'kind': 'checkpoint',
            'schema_version': SCHEMA_VERSION,
            'conductor': conductor,
            'degrees': sorted(degrees),
            'timestamp': utc_timestamp(),
        })
        with open(self.path, 'a', encoding='utf-8') as handle:
            for payload in payloads:
                payload['checksum'] = line_checksum(payload)
                handle.write(json.dumps(payload, sort_keys=True) + '\n')
            handle.flush()

    def _unfinished_tail_offset(self) -> Optional[int]:
        """Byte offset of a final line cut off before its newline, if any."""
        if not self.path.exists():
            return None
        data = self.path.read_bytes()
        if not data or data.endswith(b'\n'):
            return None
        return data.rfind(b'\n') + 1

    def _drop_unfinished_tail(self) -> None:
        offset = self._unfinished_tail_offset()
        if offset is None:
            return
        self.logger.warning(f"Truncating unfinished last line of {self.path} at byte {offset}")
        with open(self.path, 'r+b') as handle:
            handle.truncate(offset)

    def _read_payloads(self) -> List[Dict[str, Any]]:
        if not self.path.exists():
            return []

        text = self.path.read_text(encoding='utf-8')
        rows = text.split('\n')
        # No trailing newline: the last write was cut off.
        if rows[-1].strip():
            self.logger.warning(f"Ignoring unfinished last line {len(rows)} of {self.path}")
        rows = rows[:-1]

        payloads = []
        for number, raw in enumerate(rows, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                payload = json.loads(raw)
            except json.JSONDecodeError as e:
                raise CacheCorrupted(f"{self.path}:{number}: unreadable line ({e})")
            checksum = payload.pop('checksum', None)
            if checksum is None or checksum != line_checksum(payload):
                raise CacheCorrupted(f"{self.path}:{number}: checksum mismatch")
            if payload.get('schema_version') != SCHEMA_VERSION:
                raise CacheCorrupted(
                    f"{self.path}:{number}: schema version {payload.get('schema_version')} "
                    f"is not {SCHEMA_VERSION}"
                )
            payloads.append(payload)
        return payloads

    def completed(self) -> Dict[int, Set[int]]:
        """degree -> conductors finished for that degree."""
        done: Dict[int, Set[int]] = {}
        for payload in self._read_payloads():
            if payload['kind'] == 'checkpoint':
                for degree in payload['degrees']:
                    done.setdefault(degree, set()).add(payload['conductor'])
        return done

    def replay(self) -> List[ResultLine]:
        """
        Field lines of checkpointed conductors, deduplicated and sorted.

        Lines written for a conductor whose checkpoint never landed belong
        to an interrupted run and are dropped; a resumed scan rewrites them.
        """
        payloads = self._read_payloads()
        done: Set[Tuple[int, int]] = set()
        for payload in payloads:
            if payload['kind'] == 'checkpoint':
                done.update((payload['conductor'], d) for d in payload['degrees'])

        lines: Dict[Tuple[int, int, str], ResultLine] = {}
        for payload in payloads:
            if payload['kind'] != 'field':
                continue
            if (payload['conductor'], payload['degree']) not in done:
                continue
            fields = {k: v for k, v in payload.items() if k != 'kind'}
            line = ResultLine(**fields)
            lines[line.sort_key] = line

        self.logger.debug(f"Replayed {len(lines)} cached fields from {self.path}")
        return [lines[key] for key in sorted(lines)]
