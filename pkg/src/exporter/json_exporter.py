import json
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, List, Union

from .result_cache import SCHEMA_VERSION, ResultLine


class JSONExporter:
    """Export cached scan results as a single JSON document."""

    def __init__(self, output_path: Union[str, Path]):
        self.output_path = Path(output_path)
        self.output_path.parent.mkdir(parents=True, exist_ok=True)

    def to_document(self, lines: List[ResultLine]) -> Dict[str, Any]:
        # Timestamps are left out so re-exports of the same results compare equal.
        records = []
        for line in lines:
            record = asdict(line)
            record.pop('timestamp')
            record.pop('schema_version')
            records.append(record)
        return {
            'schema_version': SCHEMA_VERSION,
            'field_count': len(records),
            'records': records,
        }

    def export(self, lines: List[ResultLine]) -> Path:
        with open(self.output_path, 'w', encoding='utf-8') as f:
            json.dump(self.to_document(lines), f, indent=2, sort_keys=True)
            f.write('\n')
        return self.output_path
