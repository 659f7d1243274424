from abc import ABC, abstractmethod
from pathlib import Path
from typing import Generic, Optional, TypeVar

from app.core.logger import logger
from app.api.exceptions import StorageException

T = TypeVar('T')


# --- Base Repository for artifacts on disk ---
class FileRepository(ABC, Generic[T]):
    """Generic repository storing one artifact per file under a root directory.

    Subclasses define the file suffix and the byte or text encoding of their artifact;
    this class handles key-to-path resolution, directory creation and error wrapping.

    Attributes:
        root (Path): Directory holding the artifacts.
        suffix (str): File extension including the dot.
    """
    suffix: str = ''

    def __init__(self, root: Path | str):
        """
        Initialize the repository with its root directory.

        Args:
            root (Path | str): Directory holding the artifacts; created on first save.
        """
        self.root = Path(root)

    def path_for(self, key: str) -> Path:
        """
        Resolve the file path of an artifact key.

        Args:
            key (str): Artifact key, used as the file stem.

        Returns:
            Path: Location of the artifact.
        """
        return self.root / f'{key}{self.suffix}'

    def save(self, key: str, obj: T) -> Path:
        """
        Persist an artifact, replacing any previous one with the same key.

        Args:
            key (str): Artifact key.
            obj (T): The artifact.

        Raises:
            StorageException: If the file cannot be written.

        Returns:
            Path: The written file.
        """
        path = self.path_for(key)
        logger.debug('Saving %s artifact to %s', type(self).__name__, path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            self._write(path, obj)
        except OSError as exc:
            logger.warning('Cannot write %s: %s', path, exc)
            raise StorageException(f'Cannot write {path}: {exc}', details=[{'path': str(path)}]) from exc
        logger.debug('%s artifact saved: %s', type(self).__name__, path)
        return path

    def get(self, key: str) -> Optional[T]:
        """
        Load an artifact by key.

        Args:
            key (str): Artifact key.

        Raises:
            StorageException: If the file exists but cannot be read.

        Returns:
            Optional[T]: The artifact, or None when no file exists for the key.
        """
        path = self.path_for(key)
        if not path.exists():
            logger.debug('No %s artifact at %s', type(self).__name__, path)
            return None
        try:
            return self._read(path)
        except OSError as exc:
            logger.warning('Cannot read %s: %s', path, exc)
            raise StorageException(f'Cannot read {path}: {exc}', details=[{'path': str(path)}]) from exc

    def delete(self, key: str) -> None:
        """
        Remove an artifact if present.

        Args:
            key (str): Artifact key.
        """
        path = self.path_for(key)
        logger.debug('Deleting %s artifact %s', type(self).__name__, path)
        path.unlink(missing_ok=True)

    @abstractmethod
    def _write(self, path: Path, obj: T) -> None:
        ...

    @abstractmethod
    def _read(self, path: Path) -> T:
        ...
