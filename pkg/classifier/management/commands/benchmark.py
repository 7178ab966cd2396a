import asyncio

from classifier.config import METHOD_CHOICES
from classifier.runner import run_benchmark

from ._common import SpdCommand


class Command(SpdCommand):
    help = '''Time classification methods on identical inputs

    Reports total and per-query wall time in milliseconds and the accuracy of each method.

    Examples:
        python manage.py benchmark train.jsonl test.jsonl
        python manage.py benchmark train.jsonl test.jsonl --variants fm le geo-nn --format text
    '''

    def add_arguments(self, parser):
        parser.add_argument('train', type=str, help='Training dataset (JSON Lines)')
        parser.add_argument('test', type=str, help='Test dataset (JSON Lines)')
        parser.add_argument(
            '--variants',
            nargs='+',
            choices=METHOD_CHOICES,
            default=['fm', 'cs', 'le'],
            help='Methods to time, in order (default: fm cs le)'
        )
        self.add_run_arguments(parser)

    def run(self, **options):
        config = self.run_config(options)
        report = asyncio.run(run_benchmark(options['train'], options['test'], options['variants'], config))
        for row in report.rows:
            self.stderr.write(f"{row.variant}: {row.total_ms:.1f} ms total, {row.per_query_ms:.2f} ms per query")
        return report
