import os
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from .errors import ConfigError

DEFAULT_CACHE_PATH = 'data/relclass_cache.jsonl'

# Published conductor bounds B_a for fields whose h^- divides 2**a.
DEFAULT_BOUNDS: Dict[int, int] = {0: 2500, 1: 6300, 2: 16000, 3: 36000, 4: 84000}


class Config:
    """
    YAML configuration with built-in defaults.

    Environment variables RELCLASS_CACHE and RELCLASS_ENDPOINT override the
    file; CLI flags override both.
    """

    def __init__(self, config_path: Optional[str] = "config.yaml", required: bool = False):
        self.config_path = Path(config_path) if config_path else None
        self._config = self._load_config(required)

    def _load_config(self, required: bool) -> Dict[str, Any]:
        if self.config_path is None or not self.config_path.exists():
            if required:
                raise ConfigError(f"Config file not found: {self.config_path}")
            return {}

        with open(self.config_path, 'r') as file:
            loaded = yaml.safe_load(file) or {}
        if not isinstance(loaded, dict):
            raise ConfigError(f"Config file {self.config_path} must contain a mapping")
        return loaded

    @property
    def scan_settings(self) -> Dict[str, Any]:
        return self._config.get('scan', {}) or {}

    @property
    def max_conductor(self) -> int:
        return int(self.scan_settings.get('max_conductor', 1000))

    @property
    def degrees(self) -> List[int]:
        return [int(d) for d in self.scan_settings.get('degrees', [4])]

    @property
    def a_max(self) -> int:
        return int(self.scan_settings.get('a_max', 4))

    @property
    def workers(self) -> int:
        return int(self.scan_settings.get('workers', 1))

    @property
    def cache_path(self) -> str:
        env = os.getenv('RELCLASS_CACHE')
        if env:
            return env
        return (self._config.get('cache', {}) or {}).get('path', DEFAULT_CACHE_PATH)

    @property
    def crosscheck_settings(self) -> Dict[str, Any]:
        return self._config.get('crosscheck', {}) or {}

    @property
    def endpoint(self) -> Optional[str]:
        return os.getenv('RELCLASS_ENDPOINT') or self.crosscheck_settings.get('endpoint')

    @property
    def published_bounds(self) -> Dict[int, int]:
        bounds = self._config.get('bounds') or DEFAULT_BOUNDS
        return {int(a): int(b) for a, b in bounds.items()}

    @property
    def oracle_guard(self) -> float:
        return float((self._config.get('oracle', {}) or {}).get('guard', 0.1))

    @property
    def trial_limit(self) -> int:
        return int((self._config.get('factorization', {}) or {}).get('trial_limit', 10**7))
