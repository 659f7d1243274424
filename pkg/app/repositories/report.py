import json
from pathlib import Path

from app.domains.certify.schema import SpectralReport
from app.repositories.base import FileRepository


class ReportRepository(FileRepository[SpectralReport]):
    """JSON documents of spectral reports, one file per operator."""
    suffix = '.json'

    def _write(self, path: Path, obj: SpectralReport) -> None:
        path.write_text(obj.model_dump_json(indent=2) + '\n', encoding='utf-8')

    def _read(self, path: Path) -> SpectralReport:
        return SpectralReport.model_validate(json.loads(path.read_text(encoding='utf-8')))
