import asyncio

from classifier.config import METHOD_CHOICES
from classifier.runner import run_classify

from ._common import SpdCommand


class Command(SpdCommand):
    help = '''Classify SPD test points against convex class models built from training points

    Training points are grouped by label into one convex class model each; every
    test point is assigned to the class whose model is nearest.

    Examples:
        python manage.py classify train.jsonl test.jsonl
        python manage.py classify train.jsonl test.jsonl --variant le --weights
        python manage.py classify train.jsonl test.jsonl --variant geo-nn --format text
        python manage.py classify train.jsonl test.jsonl --threads 4 --out report.json
    '''

    def add_arguments(self, parser):
        parser.add_argument('train', type=str, help='Training dataset (JSON Lines)')
        parser.add_argument('test', type=str, help='Test dataset (JSON Lines)')
        parser.add_argument(
            '--variant',
            choices=METHOD_CHOICES,
            default=None,
            help='Convex-model variant or baseline (default: fm)'
        )
        parser.add_argument(
            '--weights',
            action='store_true',
            default=None,
            help='Include the optimal simplex weights of every class in the report'
        )
        self.add_run_arguments(parser)

    def run(self, **options):
        config = self.run_config(options, variant=options['variant'], include_weights=options['weights'])
        report = asyncio.run(run_classify(options['train'], options['test'], config))
        if report.accuracy is not None:
            self.stderr.write(self.style.SUCCESS(f"{report.variant}: accuracy {report.accuracy:.4f} on {len(report.queries)} queries"))
        return report
