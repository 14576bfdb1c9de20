"""
Experiment report model and its serialized forms.
"""
import csv
import io
import json
import math
from typing import Dict, List, Optional, Union

from pydantic import BaseModel, Field

Cell = Union[bool, int, float, str, None]


class Provenance(BaseModel):
    seed: int
    config_hash: str
    tool_version: str


class ExperimentReport(BaseModel):
    """Tabular experiment result with verdicts, flags and provenance."""
    experiment_id: str
    function_tag: str
    columns: List[str]
    rows: List[Dict[str, Cell]] = Field(default_factory=list)
    verdicts: Dict[str, str] = Field(default_factory=dict)
    flags: List[str] = Field(default_factory=list)
    parameters: Dict[str, Cell] = Field(default_factory=dict)
    provenance: Provenance

    def to_json(self) -> str:
        """JSON document; infinities are written as Infinity."""
        return json.dumps(self.model_dump(mode='python'), sort_keys=True, indent=2, allow_nan=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> 'ExperimentReport':
        return cls.model_validate(json.loads(text))

    def to_csv(self) -> str:
        """Comma-separated table with a header row and LF line endings."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_cell(row.get(column)) for column in self.columns])
        return buffer.getvalue()

    def column(self, name: str) -> List[Cell]:
        return [row.get(name) for row in self.rows]

    def numeric_column(self, name: str) -> List[Optional[float]]:
        values = []
        for cell in self.column(name):
            if isinstance(cell, bool) or not isinstance(cell, (int, float)):
                values.append(None)
            else:
                values.append(float(cell))
        return values


def format_cell(cell: Cell) -> str:
    if cell is None:
        return ''
    if isinstance(cell, bool):
        return 'true' if cell else 'false'
    if isinstance(cell, float):
        if math.isinf(cell):
            return 'inf' if cell > 0 else '-inf'
        return repr(cell)
    return str(cell)
