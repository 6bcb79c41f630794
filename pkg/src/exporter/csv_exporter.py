import pandas as pd
from pathlib import Path
from typing import List, Union

from .result_cache import ResultLine

CSV_COLUMNS = [
    'conductor', 'degree', 'label', 'w', 'h_minus',
    'eq2_ok', 'eq4_ok', 'oracle_ok', 'mechanism_ok',
]


class CSVExporter:
    """Export cached scan results to CSV."""

    def __init__(self, output_path: Union[str, Path]):
        self.output_path = Path(output_path)
        self.output_path.parent.mkdir(parents=True, exist_ok=True)

    def to_frame(self, lines: List[ResultLine]) -> pd.DataFrame:
        """
        One row per field, in cache order.

        Flags are written as lower-case true/false; eq4_ok may be n/a.
        h_minus stays a string so no integer width applies.
        """
        rows = [
            {
                'conductor': line.conductor,
                'degree': line.degree,
                'label': line.label,
                'w': line.w,
                'h_minus': line.h_minus,
                'eq2_ok': _flag(line.eq2_ok),
                'eq4_ok': _flag(line.eq4_ok),
                'oracle_ok': _flag(line.oracle_ok),
                'mechanism_ok': _flag(line.mechanism_ok),
            }
            for line in lines
        ]
        return pd.DataFrame(rows, columns=CSV_COLUMNS, dtype=object)

    def export(self, lines: List[ResultLine]) -> Path:
        self.to_frame(lines).to_csv(self.output_path, index=False, lineterminator='\n')
        return self.output_path


def _flag(value) -> str:
    if isinstance(value, bool):
        return 'true' if value else 'false'
    return str(value)
