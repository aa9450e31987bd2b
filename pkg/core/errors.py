# ============================================================================
# EXIT CODES SHARED BY EVERY MANAGEMENT COMMAND
# ============================================================================

import logging

from django.core.management.base import CommandError
from rest_framework.exceptions import ValidationError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_STAGE_ERROR = 1
EXIT_CONFIG_ERROR = 2
EXIT_COVERAGE_FAILURE = 3
EXIT_NO_ADMISSIBLE_CLASS = 4


def exit_code_for(exc: BaseException) -> int:
    """Domain errors carry an `exit_code` class attribute; invalid documents count as config errors."""
    if isinstance(exc, ValidationError):
        return EXIT_CONFIG_ERROR
    return getattr(exc, 'exit_code', EXIT_STAGE_ERROR)


def as_command_error(exc: BaseException, stage: str = None, returncode: int = None) -> CommandError:
    prefix = f"[{stage}] " if stage else ''
    detail = exc.detail if isinstance(exc, ValidationError) else exc
    return CommandError(f"{prefix}{type(exc).__name__}: {detail}", returncode=returncode or exit_code_for(exc))
