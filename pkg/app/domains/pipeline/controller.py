from pathlib import Path
from typing import List, Optional

import numpy as np
import typer
from rich.console import Console
from rich.table import Table

from app.core.logger import logger
from app.core.environment import settings
from app.api.api_schemas import ResponseSchema
from app.api.dependencies import get_ground_state_service, get_grid_service, get_pipeline_service
from app.api.exception_handlers import handle_exceptions
from app.api.exceptions import CertificationException, ConfigurationException
from app.domains.certify.schema import SpectralReport, Verdict
from app.domains.ground_state.model import RadialProfile
from app.domains.pipeline.schema import OperatorSelector, RunConfig

console = Console()


def _format_bound(value: Optional[float]) -> str:
    return '-' if value is None else f'{value:.4f}'


def _report_table(reports: List[SpectralReport]) -> Table:
    table = Table(title='Spectral reports')
    for column in ('operator', 'eigenvalues', 'parities', 'odd', 'even', 'overall', 'verdict', 'C1', 'flags'):
        table.add_column(column)
    for report in reports:
        table.add_row(
            report.operator,
            ', '.join(f'{v:.4f}' for v in report.eigenvalues),
            ', '.join(report.parities),
            _format_bound(report.bounds.odd),
            _format_bound(report.bounds.even),
            _format_bound(report.bounds.overall),
            report.verdict.value,
            _format_bound(report.c1_estimate),
            '; '.join(report.flags)
        )
    return table


# --- Commands ---
@handle_exceptions
def run_command(
    L: Optional[float] = typer.Option(None, '--L', help='Half-width of the computational square'),
    a: Optional[float] = typer.Option(None, '--a', help='Steepness of the grid mapping'),
    n: Optional[int] = typer.Option(None, '--n', help='Chebyshev degree N (even)'),
    radial_nodes: Optional[int] = typer.Option(None, '--radial-nodes', help='Radial grid size'),
    operator: Optional[OperatorSelector] = typer.Option(None, '--operator', help='Operator to analyse'),
    out: Optional[Path] = typer.Option(None, '--out', help='Report directory'),
    cache_dir: Optional[Path] = typer.Option(None, '--cache-dir', help='Radial profile cache directory'),
    use_cache: Optional[bool] = typer.Option(None, '--cache/--no-cache', help='Use the radial profile cache'),
    emit_slices: Optional[bool] = typer.Option(None, '--emit-slices/--no-emit-slices', help='Write CSV plot data'),
    tol_eig: Optional[float] = typer.Option(None, '--tol-eig', help='Eigenpair residual tolerance'),
    tol_radial: Optional[float] = typer.Option(None, '--tol-radial', help='Radial solver tolerance'),
    eig_mode: Optional[str] = typer.Option(None, '--eig-mode', help="'general' or 'symmetrized'"),
    max_k: Optional[int] = typer.Option(None, '--max-k', help='Largest number of eigenpairs per operator'),
    dump_matrices: Optional[bool] = typer.Option(None, '--dump-matrices/--no-dump-matrices', help='Write binary matrix dumps'),
    require_positive: Optional[bool] = typer.Option(
        None, '--require-positive/--allow-not-certified', help='Exit with status 4 unless every verdict is positive'
    ),
    config_file: Optional[Path] = typer.Option(None, '--config', help='YAML or JSON config file'),
    as_json: bool = typer.Option(False, '--json', help='Print the reports as a JSON document')
) -> None:
    """
    Run the full pipeline and write one report per operator.

    Args:
        L (Optional[float]): Half-width override.
        a (Optional[float]): Mapping steepness override.
        n (Optional[int]): Chebyshev degree override.
        radial_nodes (Optional[int]): Radial grid size override.
        operator (Optional[OperatorSelector]): Operator selector override.
        out (Optional[Path]): Report directory override.
        cache_dir (Optional[Path]): Cache directory override.
        use_cache (Optional[bool]): Cache toggle override.
        emit_slices (Optional[bool]): Plot data toggle override.
        tol_eig (Optional[float]): Eigen tolerance override.
        tol_radial (Optional[float]): Radial tolerance override.
        eig_mode (Optional[str]): Eigensolver mode override.
        max_k (Optional[int]): Eigenpair count override.
        dump_matrices (Optional[bool]): Matrix dump toggle override.
        require_positive (Optional[bool]): Strict verdict override.
        config_file (Optional[Path]): Structured config file.
        as_json (bool): Print JSON instead of a table.

    Raises:
        CertificationException: If a positive verdict is required and missing.
    """
    config = RunConfig.from_sources(config_file, {
        'L': L, 'a': a, 'N': n, 'radial_nodes': radial_nodes, 'operator': operator, 'out': out,
        'cache_dir': cache_dir, 'use_cache': use_cache, 'emit_slices': emit_slices, 'tol_eig': tol_eig,
        'tol_radial': tol_radial, 'eig_mode': eig_mode, 'max_k': max_k, 'dump_matrices': dump_matrices,
        'require_positive': require_positive,
    })
    logger.info('Starting run command with operator=%s', config.operator.value)
    reports = get_pipeline_service(config).run_pipeline()

    if as_json:
        console.print_json(ResponseSchema[List[SpectralReport]](command='run', data=reports).model_dump_json())
    else:
        console.print(_report_table(reports))

    failing = [r.operator for r in reports if r.verdict != Verdict.POSITIVE]
    if config.require_positive and failing:
        raise CertificationException(
            f'Coercivity not certified for: {", ".join(failing)}.', details=[{'operators': failing}]
        )
    logger.info('Run command finished')


@handle_exceptions
def ground_state_command(
    L: float = typer.Option(settings.DEFAULT_L, '--L', help='Half-width of the computational square'),
    nodes: int = typer.Option(settings.RADIAL_NODES, '--nodes', help='Radial grid size'),
    method: str = typer.Option('both', '--method', help="'renormalization', 'shooting' or 'both'"),
    tol: float = typer.Option(settings.TOL_RADIAL, '--tol', help='Renormalization tolerance')
) -> None:
    """
    Solve the radial ground state and print its integral diagnostics.

    With --method both, the two solvers are compared pointwise on [0, L].

    Args:
        L (float): Half-width.
        nodes (int): Radial grid size.
        method (str): Solver selection.
        tol (float): Renormalization tolerance.
    """
    service = get_ground_state_service()
    profiles: List[RadialProfile] = []
    if method in ('renormalization', 'both'):
        profiles.append(service.solve_radial(L, nodes, tol))
    if method in ('shooting', 'both'):
        profiles.append(service.shoot_radial(L, n_nodes=nodes))
    if not profiles:
        raise ConfigurationException(f'Unknown method {method!r}; expected renormalization, shooting or both.')

    table = Table(title=f'Radial ground state (L={L}, nodes={nodes})')
    for column in ('method', 'R(0)', 'iterations', 'residual', 'mass', 'grad_sq', 'l4_4', 'energy'):
        table.add_column(column)
    for profile in profiles:
        diagnostics = service.radial_diagnostics(profile)
        table.add_row(
            profile.method.value, f'{profile.amplitude:.8f}', str(profile.iterations), f'{profile.residual:.2e}',
            f'{diagnostics.mass:.8f}', f'{diagnostics.grad_sq:.8f}', f'{diagnostics.l4_4:.8f}', f'{diagnostics.energy:.2e}'
        )
    console.print(table)

    if len(profiles) == 2:
        inside = profiles[0].nodes <= L
        difference = float(np.max(np.abs(profiles[0].values[inside] - profiles[1].values[inside])))
        console.print(f'max |renormalization - shooting| on [0, L]: {difference:.3e}')


@handle_exceptions
def grid_info_command(
    n: int = typer.Option(settings.DEFAULT_N, '--n', help='Chebyshev degree N (even)'),
    L: float = typer.Option(settings.DEFAULT_L, '--L', help='Half-width'),
    a: float = typer.Option(settings.DEFAULT_A, '--a', help='Mapping steepness')
) -> None:
    """
    Print metrics of the mapped grid and a quadrature check on e^{−x²}.

    Args:
        n (int): Chebyshev degree.
        L (float): Half-width.
        a (float): Mapping steepness.
    """
    grid = get_grid_service().build_grid(n, L, a)
    spacing = -np.diff(grid.x)
    table = Table(title='Mapped Chebyshev grid')
    table.add_column('quantity')
    table.add_column('value')
    rows = [
        ('N', str(grid.N)),
        ('L', f'{grid.L:g}'),
        ('a', f'{grid.a:g}'),
        ('min spacing', f'{spacing.min():.6e}'),
        ('max spacing', f'{spacing.max():.6e}'),
        ('dx/dxi at 0', f'{grid.x_xi[grid.N // 2]:.6f}'),
        ('sum of weights', f'{grid.w.sum():.6f}'),
        ('gaussian quadrature error', f'{abs(grid.w @ np.exp(-grid.x ** 2) - np.sqrt(np.pi)):.3e}'),
        ('max |D1 * 1|', f'{np.max(np.abs(grid.D1.sum(axis=1))):.3e}'),
    ]
    for name, value in rows:
        table.add_row(name, value)
    console.print(table)
