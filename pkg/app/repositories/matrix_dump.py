from pathlib import Path

import numpy as np

from app.api.exceptions import StorageException
from app.repositories.base import FileRepository

HEADER_DTYPE = np.dtype('<i8')
DATA_DTYPE = np.dtype('<f8')


class MatrixDumpRepository(FileRepository[np.ndarray]):
    """Raw matrix dumps: a 16-byte header of two little-endian int64 dimensions, then
    float64 entries in row-major order."""
    suffix = '.bin'

    def _write(self, path: Path, obj: np.ndarray) -> None:
        rows, cols = obj.shape
        with path.open('wb') as handle:
            handle.write(np.array([rows, cols], dtype=HEADER_DTYPE).tobytes())
            handle.write(np.ascontiguousarray(obj, dtype=DATA_DTYPE).tobytes(order='C'))

    def _read(self, path: Path) -> np.ndarray:
        raw = path.read_bytes()
        rows, cols = np.frombuffer(raw[:16], dtype=HEADER_DTYPE)
        data = np.frombuffer(raw[16:], dtype=DATA_DTYPE)
        if data.size != rows * cols:
            raise StorageException(
                f'Matrix dump {path} holds {data.size} entries, header announces {rows}x{cols}.',
                details=[{'path': str(path)}]
            )
        return data.reshape((int(rows), int(cols))).copy()
