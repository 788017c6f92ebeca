"""
Shared plumbing for the tiling management commands.

Exit statuses: 0 tiled or valid, 1 absent or invalid, 2 unknown, 3 any other error.
"""

from django.core.management.base import CommandError

from tiling.exceptions import TilingError
from tiling.services.config import parse_alpha
from tiling.utils.textio import read_graph

EXIT_NEGATIVE = 1
EXIT_UNKNOWN = 2
EXIT_ERROR = 3


def read_text(path):
    try:
        with open(path, encoding='utf-8') as handle:
            return handle.read()
    except OSError as exc:
        raise CommandError(f"cannot read {path}: {exc.strerror}", returncode=EXIT_ERROR)


def write_text(path, text):
    try:
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write(text)
    except OSError as exc:
        raise CommandError(f"cannot write {path}: {exc.strerror}", returncode=EXIT_ERROR)


def load_graph(path):
    """Read and parse a graph file; parse failures exit with status 3."""
    try:
        return read_graph(read_text(path))
    except TilingError as exc:
        raise CommandError(f"{path}: {exc}", returncode=EXIT_ERROR)


def alpha_option(value):
    if value is None:
        return None
    try:
        return parse_alpha(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise CommandError(str(exc), returncode=EXIT_ERROR)


def fail(exc, context=''):
    """Translate a library error into CommandError with the error status."""
    prefix = f"{context}: " if context else ''
    return CommandError(f"{prefix}{exc}", returncode=EXIT_ERROR)
