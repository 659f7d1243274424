import typer

from app.core.logger import logger_settings
from app.domains.pipeline.controller import grid_info_command, ground_state_command, run_command

cli = typer.Typer(
    name='virial-spectrum',
    help='Spectral verification of the linearized virial operator around the 2D cubic ground state.',
    add_completion=False,
    no_args_is_help=True
)


@cli.callback()
def configure_logging(
    verbose: bool = typer.Option(False, '--verbose', '-v', help='Log DEBUG messages to stderr'),
    quiet: bool = typer.Option(False, '--quiet', '-q', help='Log warnings and errors only')
) -> None:
    if verbose:
        logger_settings.set_level('DEBUG')
    elif quiet:
        logger_settings.set_level('WARNING')


# --- Commands ---
cli.command('run')(run_command)
cli.command('ground-state')(ground_state_command)
cli.command('grid-info')(grid_info_command)


if __name__ == '__main__':
    cli()
