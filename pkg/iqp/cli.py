"""Standalone entry point: ``python -m iqp <subcommand> ...`` runs the ``iqp`` management command."""
import os
import sys


def run(argv):
    """Run the command line on ``argv`` and return its exit code."""
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "iqp_lab.settings")
    from django.core.management import execute_from_command_line

    try:
        execute_from_command_line(["iqp", "iqp", *argv])
    except SystemExit as exc:
        if exc.code is None:
            return 0
        return exc.code if isinstance(exc.code, int) else 1
    return 0


def main():
    sys.exit(run(sys.argv[1:]))
