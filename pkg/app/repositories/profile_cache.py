from pathlib import Path
from typing import Dict, Optional

import numpy as np

from app.core.logger import logger
from app.domains.ground_state.model import RadialProfile, SolverMethod
from app.repositories.base import FileRepository


class RadialProfileRepository(FileRepository[RadialProfile]):
    """Plain-text cache of radial profiles.

    Two comment lines carry the metadata, `# L=<v> N=<v> method=<v> residual=<v>` and
    `# iterations=<v> r_max=<v>`, followed by one `r value deriv` triple per node in full
    decimal precision.
    """
    suffix = '.txt'

    @staticmethod
    def key_for(L: float, n_nodes: int, method: SolverMethod) -> str:
        return f'radial_L{L:g}_N{n_nodes}_{method.value}'

    def _write(self, path: Path, obj: RadialProfile) -> None:
        header = (
            f'L={obj.L!r} N={obj.nodes.size} method={obj.method.value} residual={obj.residual!r}\n'
            f'iterations={obj.iterations} r_max={obj.r_max!r}'
        )
        table = np.column_stack([obj.nodes, obj.values, obj.deriv])
        np.savetxt(path, table, fmt='%.17g', header=header, comments='# ')

    def _read(self, path: Path) -> RadialProfile:
        with path.open(encoding='utf-8') as handle:
            meta: Dict[str, str] = {}
            for _ in range(2):
                line = handle.readline().lstrip('#').strip()
                meta.update(token.split('=', 1) for token in line.split())
        table = np.loadtxt(path, comments='#', ndmin=2)
        return RadialProfile(
            L=float(meta['L']), r_max=float(meta['r_max']), nodes=table[:, 0], values=table[:, 1],
            deriv=table[:, 2], method=SolverMethod(meta['method']), iterations=int(meta['iterations']),
            residual=float(meta['residual'])
        )

    def get_matching(self, L: float, n_nodes: int, method: SolverMethod) -> Optional[RadialProfile]:
        """
        Load a cached profile only if its header matches the requested parameters.

        Args:
            L (float): Domain half-width.
            n_nodes (int): Number of radial nodes.
            method (SolverMethod): Solver that must have produced the profile.

        Returns:
            Optional[RadialProfile]: The cached profile, or None when missing, unreadable or mismatched.
        """
        key = self.key_for(L, n_nodes, method)
        try:
            profile = self.get(key)
        except (KeyError, ValueError) as exc:
            logger.warning('Discarding unreadable radial cache %s: %s', self.path_for(key), exc)
            return None
        if profile is None:
            return None
        if profile.L != L or profile.nodes.size != n_nodes or profile.method != method:
            logger.warning(
                'Radial cache %s mismatch: cached (L=%s, N=%d, method=%s), requested (L=%s, N=%d, method=%s)',
                self.path_for(key), profile.L, profile.nodes.size, profile.method.value, L, n_nodes, method.value
            )
            return None
        logger.info('Loaded cached radial profile from %s', self.path_for(key))
        return profile
