import numpy as np

from spdkit.synthbench import cluster_dataset, nn_trap_case, random_split

from classifier.datasets import load_dataset, save_dataset
from classifier.reports import GenReport

from ._common import SpdCommand


class Command(SpdCommand):
    help = '''Generate synthetic datasets and fixtures

    clusters: well separated labelled clusters (train and test files)
    nn-trap:  a two-class training set and one query that geodesic nearest
              neighbour misclassifies while the FM convex model gets it right
    split:    per-class random train/test split of an existing dataset

    Examples:
        python manage.py gen clusters --train-out train.jsonl --test-out test.jsonl
        python manage.py gen clusters --classes 3 --per-class 10 --queries 60 --dim 20 --train-out a.jsonl --test-out b.jsonl
        python manage.py gen nn-trap --dim 3 --seed 7 --train-out trap_train.jsonl --test-out trap_test.jsonl
        python manage.py gen split --input all.jsonl --per-class 5 --train-out train.jsonl --test-out test.jsonl
    '''

    def add_arguments(self, parser):
        parser.add_argument('mode', choices=['clusters', 'nn-trap', 'split'], help='What to generate')
        parser.add_argument('--train-out', type=str, required=True, help='Training dataset to write')
        parser.add_argument('--test-out', type=str, required=True, help='Test dataset to write')
        parser.add_argument('--classes', type=int, default=3, help='Number of classes (clusters, default: 3)')
        parser.add_argument('--per-class', type=int, default=10, help='Training points per class (default: 10)')
        parser.add_argument('--queries', type=int, default=30, help='Test points (clusters, default: 30)')
        parser.add_argument('--dim', type=int, default=5, help='Matrix dimension (default: 5)')
        parser.add_argument('--spread', type=float, default=0.1, help='Geodesic radius of each cluster (default: 0.1)')
        parser.add_argument('--separation', type=float, default=3.0, help='Distance of class centres from I (default: 3.0)')
        parser.add_argument('--input', type=str, default=None, help='Dataset to split (split)')
        parser.add_argument('--format', choices=['json', 'text'], default='json', help='Summary format (default: json)')
        self.add_run_arguments(parser, report_out=False)

    def run(self, **options):
        config = self.run_config(options)
        rng = np.random.default_rng(config.seed)
        mode = options['mode']

        if mode == 'clusters':
            train, test = cluster_dataset(
                options['classes'],
                options['per_class'],
                options['queries'],
                options['dim'],
                rng,
                spread=options['spread'],
                separation=options['separation'],
            )
        elif mode == 'nn-trap':
            fixture = nn_trap_case(options['dim'], rng)
            train, test = fixture.train, [(fixture.convex_label, fixture.query)]
        else:
            if not options['input']:
                raise ValueError("split needs --input")
            train, test = random_split(load_dataset(options['input']), options['per_class'], rng)

        save_dataset(options['train_out'], train)
        save_dataset(options['test_out'], test)
        self.stderr.write(self.style.SUCCESS(f"{mode}: {len(train)} training and {len(test)} test points"))
        return GenReport(mode=mode, files={options['train_out']: len(train), options['test_out']: len(test)})
