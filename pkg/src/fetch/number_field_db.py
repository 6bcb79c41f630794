import logging
import time
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple, Union
from urllib.parse import urlparse

import requests

from ..exporter.result_cache import ResultLine

UNAVAILABLE = 'unavailable'

# Keys a remote record may use for the relative class number.
H_MINUS_KEYS = ('h_minus', 'relative_class_number', 'class_number_minus')
# Keys that may list the Conrey indices of the field's character group.
CHARACTER_KEYS = ('dirichlet_group', 'char_labels', 'dirichlet_characters')


@dataclass(frozen=True)
class CrossCheckResult:
    local_label: str
    remote_identifier: Optional[str]
    remote_h_minus: Optional[str]
    match: Union[bool, str]


class NumberFieldDBClient:
    """
    Queries a public number-field database for fields by conductor and degree.

    Nothing here is fatal: network errors, unknown record shapes and
    ambiguous matches all come back as 'unavailable'.
    """

    RATE_LIMIT_DELAY = 1.0  # seconds between requests
    MAX_RETRIES = 3
    TIMEOUT = 30

    def __init__(
        self,
        endpoint: Optional[str],
        logger: logging.Logger,
        rate_limit_delay: Optional[float] = None,
        timeout: Optional[int] = None,
        max_retries: Optional[int] = None,
    ):
        self.endpoint = endpoint
        self.logger = logger
        self.rate_limit_delay = self.RATE_LIMIT_DELAY if rate_limit_delay is None else rate_limit_delay
        self.timeout = timeout or self.TIMEOUT
        self.max_retries = max_retries or self.MAX_RETRIES
        self.session = requests.Session()
        self.session.headers.update({
            'User-Agent': 'cyclic-relclass/0.1 (research cross-check)',
            'Accept': 'application/json',
        })
        self.endpoint_error = self._validate_endpoint(endpoint)
        self._last_request = 0.0

    @staticmethod
    def _validate_endpoint(endpoint: Optional[str]) -> Optional[str]:
        if not endpoint:
            return "no endpoint configured"
        parsed = urlparse(endpoint)
        if parsed.scheme not in ('http', 'https') or not parsed.netloc:
            return f"endpoint {endpoint!r} is not an http(s) URL"
        return None

    def _throttle(self) -> None:
        wait = self.rate_limit_delay - (time.monotonic() - self._last_request)
        if wait > 0:
            time.sleep(wait)
        self._last_request = time.monotonic()

    def fetch_fields(self, conductor: int, degree: int) -> Optional[List[Dict[str, Any]]]:
        """
        Remote records for one (conductor, degree), or None when unreachable.

        Args:
            conductor: Field conductor
            degree: Field degree

        Returns:
            List of remote records (possibly empty) or None on failure
        """
        params = {'degree': degree, 'conductor': conductor, '_format': 'json'}

        for attempt in range(self.max_retries):
            self._throttle()
            try:
                self.logger.debug(f"Querying {self.endpoint} for conductor {conductor}, degree {degree} "
                                  f"(attempt {attempt + 1})")
                response = self.session.get(self.endpoint, params=params, timeout=self.timeout)
                response.raise_for_status()
                data = response.json()
            except requests.exceptions.RequestException as e:
                self.logger.warning(f"Request failed for conductor {conductor} (attempt {attempt + 1}): {e}")
                continue
            except ValueError as e:
                self.logger.warning(f"Non-JSON response for conductor {conductor}: {e}")
                return None

            if isinstance(data, list):
                return data
            if isinstance(data, dict) and isinstance(data.get('data'), list):
                return data['data']
            self.logger.warning(f"Unexpected response shape for conductor {conductor}")
            return None

        return None

    @staticmethod
    def _remote_h_minus(record: Dict[str, Any]) -> Optional[str]:
        for key in H_MINUS_KEYS:
            if record.get(key) is not None:
                return str(record[key])
        return None

    @staticmethod
    def _character_indices(record: Dict[str, Any]) -> List[str]:
        for key in CHARACTER_KEYS:
            values = record.get(key)
            if isinstance(values, list):
                return [str(v).split('.')[-1] for v in values]
        return []

    def _match_record(self, line: ResultLine, group_size: int,
                      remote: List[Dict[str, Any]]) -> Optional[Dict[str, Any]]:
        """Map a local field to one remote record, or None rather than guess."""
        conrey = line.conrey_label.split('.')[-1]
        by_character = [r for r in remote if conrey in self._character_indices(r)]
        if len(by_character) == 1:
            return by_character[0]
        if group_size == 1 and len(remote) == 1:
            return remote[0]
        return None

    def crosscheck(self, lines: List[ResultLine]) -> List[CrossCheckResult]:
        """Compare cached h^- values with the remote database, field by field."""
        if not lines:
            return []

        if self.endpoint_error:
            self.logger.error(f"Cross-check disabled: {self.endpoint_error}")
            return [CrossCheckResult(line.label, None, None, UNAVAILABLE) for line in lines]

        groups: Dict[Tuple[int, int], List[ResultLine]] = {}
        for line in lines:
            groups.setdefault((line.conductor, line.degree), []).append(line)

        results = []
        for (conductor, degree), group in groups.items():
            remote = self.fetch_fields(conductor, degree)
            for line in group:
                record = self._match_record(line, len(group), remote) if remote else None
                if record is None:
                    results.append(CrossCheckResult(line.label, None, None, UNAVAILABLE))
                    continue

                remote_h = self._remote_h_minus(record)
                identifier = record.get('label')
                identifier = None if identifier is None else str(identifier)
                match: Union[bool, str] = UNAVAILABLE if remote_h is None else remote_h == line.h_minus
                results.append(CrossCheckResult(line.label, identifier, remote_h, match))

        matched = sum(1 for r in results if r.match is True)
        self.logger.info(f"Cross-checked {len(results)} fields: {matched} matches")
        return results
