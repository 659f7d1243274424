import csv
from pathlib import Path
from typing import Any, Dict, List

import numpy as np

from app.domains.field2d.model import TensorField
from app.repositories.base import FileRepository

Row = Dict[str, Any]


class FieldCsvRepository(FileRepository[np.ndarray]):
    """Fields as bordered CSV tables: first row x-nodes, first column y-nodes, body values.

    The corner cell is NaN. Rows of the body follow y, columns follow x.
    """
    suffix = '.csv'

    @staticmethod
    def bordered(field: TensorField) -> np.ndarray:
        """Table with the node coordinates on its border."""
        nodes = field.grid.x
        table = np.empty((nodes.size + 1, nodes.size + 1))
        table[0, 0] = np.nan
        table[0, 1:] = nodes
        table[1:, 0] = nodes
        table[1:, 1:] = field.values.T
        return table

    def save_field(self, key: str, field: TensorField) -> Path:
        return self.save(key, self.bordered(field))

    def _write(self, path: Path, obj: np.ndarray) -> None:
        np.savetxt(path, obj, fmt='%.17g', delimiter=',')

    def _read(self, path: Path) -> np.ndarray:
        return np.loadtxt(path, delimiter=',', ndmin=2)


class CsvTableRepository(FileRepository[List[Row]]):
    """Row-oriented CSV tables with a header line (profiles, slices, angles, summaries)."""
    suffix = '.csv'

    def _write(self, path: Path, obj: List[Row]) -> None:
        fieldnames = list(obj[0].keys()) if obj else []
        with path.open('w', newline='', encoding='utf-8') as handle:
            writer = csv.DictWriter(handle, fieldnames=fieldnames)
            writer.writeheader()
            writer.writerows(obj)

    def _read(self, path: Path) -> List[Row]:
        with path.open(newline='', encoding='utf-8') as handle:
            return list(csv.DictReader(handle))
