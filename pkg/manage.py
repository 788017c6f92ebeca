#!/usr/bin/env python
"""
Entry point for the toolkit.

Besides the usual Django commands this runs the tiling CLI:
construct, tile, refute, verify, scan and info.
"""
import os
import sys


def main():
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'config.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django; install requirements.txt into the active environment"
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == '__main__':
    main()
