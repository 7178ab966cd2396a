from classifier.runner import RECIPES, run_descriptor

from ._common import SpdCommand


class Command(SpdCommand):
    help = '''Build covariance descriptors from CSV grids or feature tables

    Recipes:
        brodatz  grayscale grid -> 5x5 covariance of intensity and derivative magnitudes
        ethz     RGB grid (three CSV blocks) -> 11x11 covariance of position, colour and gradients
        table    CSV of feature rows -> covariance of the rows
        dct-set  grayscale frames (all inputs) -> kxk covariance of their DCT coefficients

    Examples:
        python manage.py descriptor texture1.csv texture2.csv --recipe brodatz --out textures.jsonl
        python manage.py descriptor person.csv --recipe ethz --label alice --out ethz.jsonl --append
        python manage.py descriptor frame_*.csv --recipe dct-set --k 15 --subtract-mean-frame --out ucsd.jsonl
        python manage.py descriptor frame_*.csv --recipe dct-set --k 15 --resize 140 161 --out ucsd.jsonl
        python manage.py descriptor flat.csv --recipe brodatz --ridge 0.01 --out flat.jsonl
    '''

    def add_arguments(self, parser):
        parser.add_argument('inputs', nargs='+', type=str, help='CSV input files')
        parser.add_argument('--recipe', choices=RECIPES, required=True, help='Feature recipe')
        parser.add_argument('--out', type=str, required=True, help='Dataset file to write (JSON Lines)')
        parser.add_argument('--label', type=str, default=None, help='Label for every record (default: file name)')
        parser.add_argument('--k', type=int, default=None, help='DCT coefficients per frame (dct-set)')
        parser.add_argument('--subtract-mean-frame', action='store_true', help='Subtract the mean frame first (dct-set)')
        parser.add_argument('--normalize-variance', action='store_true', help='Divide pixels by their std over the set (dct-set)')
        parser.add_argument(
            '--resize',
            nargs=2,
            type=int,
            default=None,
            metavar=('ROWS', 'COLS'),
            help='Linearly resize every frame first, e.g. 140 161 (dct-set)'
        )
        parser.add_argument(
            '--ridge',
            type=float,
            default=None,
            help='Ridge added to every covariance (default: SPD_RIDGE, or 1e-6 times the mean variance)'
        )
        parser.add_argument('--append', action='store_true', help='Append to --out instead of replacing it')
        self.add_run_arguments(parser, report_out=False)

    def run(self, **options):
        config = self.run_config(options, ridge=options['ridge'])
        report = run_descriptor(
            options['inputs'],
            options['recipe'],
            options['out'],
            config,
            label=options['label'],
            k=options['k'],
            subtract_mean_frame=options['subtract_mean_frame'],
            normalize_variance=options['normalize_variance'],
            resize=tuple(options['resize']) if options['resize'] else None,
            append=options['append'],
        )
        self.stderr.write(self.style.SUCCESS(f"Wrote {report.records} record(s) to {report.out}"))
        return report
