import functools
import logging
import sys
from typing import Any, Callable, List, Optional, TypeVar, cast

import typer
from pydantic import ValidationError

from app.core.logger import logger
from app.api.api_schemas import ErrorSchema
from app.api.exceptions import ToolkitException, ConfigurationException

F = TypeVar('F', bound=Callable[..., Any])

# configuration errors and refused certification
WARNING_EXIT_CODES = (2, 4)


def error_response(
    error: str,
    message: str,
    stage: str,
    details: Optional[List[Any]] = None,
    exit_code: int = 1,
    exc_info: Optional[BaseException] = None
) -> typer.Exit:
    """Log the failure once, write a standardized JSON error document to stderr and build the exit signal.

    Exit codes 2 and 4 are logged as warnings, everything else as errors.

    Args:
        error (str): Exception class name.
        message (str): A human-readable error message.
        stage (str): Pipeline stage the error is attributed to.
        details (Optional[List[Any]]): Additional technical or contextual information. Defaults to None.
        exit_code (int): Process exit status. Defaults to 1.
        exc_info (Optional[BaseException]): Exception whose traceback is logged. Defaults to None.

    Returns:
        typer.Exit: Exit signal carrying the status code; the caller raises it.
    """
    level = logging.WARNING if exit_code in WARNING_EXIT_CODES else logging.ERROR
    logger.log(
        level, '%s in stage %s: %s | Details: %s | Exit code: %d', error, stage, message, details, exit_code,
        exc_info=exc_info
    )
    schema = ErrorSchema(error=error, stage=stage, message=message, details=details, exit_code=exit_code)
    sys.stderr.write(schema.model_dump_json(indent=2) + '\n')
    return typer.Exit(code=exit_code)


def handle_exceptions(command: F) -> F:
    """Wrap a command so that every failure ends in an ErrorSchema and a mapped exit code.

    Toolkit exceptions carry their own stage and exit code; pydantic validation errors
    are configuration errors (exit 2); anything else is an internal error (exit 1).

    Args:
        command (F): The typer command callback.

    Returns:
        F: The wrapped callback.
    """

    @functools.wraps(command)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return command(*args, **kwargs)
        except typer.Exit:
            raise
        except ToolkitException as exc:
            raise error_response(type(exc).__name__, exc.message, exc.stage, exc.details, exc.exit_code) from exc
        except ValidationError as exc:
            errors: List[Any] = [
                {'loc': list(e['loc']), 'msg': e['msg']} for e in exc.errors()
            ]
            raise error_response(
                type(exc).__name__, 'Configuration validation error', ConfigurationException.default_stage, errors,
                ConfigurationException.exit_code
            ) from exc
        except Exception as exc:
            raise error_response(
                type(exc).__name__, 'Internal error', 'internal', [{'error': str(exc)}], 1, exc_info=exc
            ) from exc

    return cast(F, wrapper)
