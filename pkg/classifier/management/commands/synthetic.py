import asyncio

from spdkit.params import ErrorTrialConfig

from classifier.runner import run_synthetic

from ._common import SpdCommand


class Command(SpdCommand):
    help = '''Run a synthetic experiment

    error:   approximation error of the FM, CS and LE distances for queries moved
             away from a three-point convex model along a geodesic
    augment: Geo-NN accuracy as weighted Fréchet means are added to each class,
             against MCCM-FM on the original classes

    Examples:
        python manage.py synthetic
        python manage.py synthetic --trials 10 --multipliers 5 10 --format text
        python manage.py synthetic --experiment augment --counts 0 10 50
        python manage.py synthetic --experiment augment --train train.jsonl --test test.jsonl
    '''

    def add_arguments(self, parser):
        parser.add_argument(
            '--experiment',
            choices=['error', 'augment'],
            default='error',
            help='Experiment to run (default: error)'
        )
        parser.add_argument('--dim', type=int, default=None, help='Matrix dimension of the error study (default: 5)')
        parser.add_argument('--trials', type=int, default=None, help='Number of trials (default: 50)')
        parser.add_argument(
            '--multipliers',
            type=float,
            nargs='+',
            default=None,
            help='Query distances as multiples of D (default: 5 10 100 200)'
        )
        parser.add_argument('--spread', type=float, default=None, help='Tangent norm placing the three points (default: 0.8)')
        parser.add_argument('--condition-cap', type=float, default=None, help='Eigenvalue ratio cap of the random centre (default: 10)')
        parser.add_argument('--train', type=str, default=None, help='Training dataset for augment')
        parser.add_argument('--test', type=str, default=None, help='Test dataset for augment')
        parser.add_argument(
            '--counts',
            type=int,
            nargs='+',
            default=None,
            help='Points added per class for augment (default: 0 5 10 20)'
        )
        self.add_run_arguments(parser)

    def run(self, **options):
        config = self.run_config(options)
        flags = {
            'dim': options['dim'],
            'trials': options['trials'],
            'multipliers': options['multipliers'],
            'spread': options['spread'],
            'condition_cap': options['condition_cap'],
        }
        trial_config = ErrorTrialConfig.model_validate({
            **config.error_trial.model_dump(),
            **{key: value for key, value in flags.items() if value is not None},
        })
        config = config.model_copy(update={'error_trial': trial_config})
        report = asyncio.run(run_synthetic(
            config,
            experiment=options['experiment'],
            train_path=options['train'],
            test_path=options['test'],
            counts=options['counts'],
        ))
        table = report.error_table
        if table is not None and table.failures:
            self.stderr.write(self.style.WARNING(f"{len(table.failures)} of {table.trials} trials failed"))
        return report
