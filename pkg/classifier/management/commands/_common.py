"""
Shared plumbing for the classifier management commands.

Reports go to stdout (or --out) as JSON, or as a text table with --format text.
Progress and status lines go to stderr so stdout stays machine readable.
"""

from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from classifier.config import RunConfig
from classifier.datasets import DatasetError
from classifier.render import render_report
from classifier.reports import ErrorReport
from spdkit.exceptions import SpdError

# ValueError covers pydantic validation and malformed --config JSON
HANDLED_ERRORS = (SpdError, DatasetError, ValueError, OSError)


class SpdCommand(BaseCommand):
    """Base command: common flags, config layering, report output and error reports."""

    def add_run_arguments(self, parser, report_out=True):
        parser.add_argument(
            '--seed',
            type=int,
            default=None,
            help='Seed for every random draw (default: SPD_SEED setting)'
        )
        parser.add_argument(
            '--threads',
            type=int,
            default=None,
            help='Queries or trials solved concurrently (default: SPD_THREADS setting)'
        )
        parser.add_argument(
            '--config',
            type=str,
            default=None,
            help='JSON file with RunConfig fields, e.g. {"spg": {"max_iter": 1000}}'
        )
        if report_out:
            parser.add_argument(
                '--out',
                type=str,
                default=None,
                help='Write the report to this file instead of stdout'
            )
            parser.add_argument(
                '--format',
                choices=['json', 'text'],
                default='json',
                help='Report format (default: json)'
            )

    def run_config(self, options, **overrides):
        """Settings, then --config, then the flags given on the command line."""
        return RunConfig.from_settings(
            config_path=options.get('config'),
            seed=options.get('seed'),
            threads=options.get('threads'),
            **overrides,
        )

    def handle(self, *args, **options):
        try:
            report = self.run(**options)
        except HANDLED_ERRORS as exc:
            self.fail(exc)
        self.emit(report, options)

    def run(self, **options):
        raise NotImplementedError('subclasses of SpdCommand must provide a run() method')

    def emit(self, report, options):
        text = render_report(report) if options.get('format') == 'text' else report.to_json(indent=2)
        out = options.get('out')
        if out:
            Path(out).parent.mkdir(parents=True, exist_ok=True)
            Path(out).write_text(text if text.endswith('\n') else text + '\n', encoding='utf-8')
            self.stderr.write(self.style.SUCCESS(f"Report written to {out}"))
        else:
            self.stdout.write(text.rstrip('\n'))

    def fail(self, exc):
        """Print the structured error report and exit with status 1."""
        self.stdout.write(ErrorReport.from_exception(exc).to_json())
        raise CommandError(f"{type(exc).__name__}: {exc}", returncode=1) from exc
