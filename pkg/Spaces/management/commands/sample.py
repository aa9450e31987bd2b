from pathlib import Path

from django.core.management.base import BaseCommand

from core.errors import EXIT_CONFIG_ERROR, as_command_error
from Spaces.samplers import sample_circle, sample_lens, sample_moore
from Spaces.serializers import save_dataset


class Command(BaseCommand):
    help = 'Sample a dataset from one of the example spaces and write it as JSON'

    def add_arguments(self, parser):
        parser.add_argument(
            '--space',
            choices=['circle', 'moore', 'lens'],
            required=True,
            help='Space to sample from'
        )
        parser.add_argument(
            '--points',
            type=int,
            default=2000,
            help='Number of sample points'
        )
        parser.add_argument(
            '--seed',
            type=int,
            default=0,
            help='Random seed'
        )
        parser.add_argument(
            '--noise',
            type=float,
            default=0.1,
            help='Normal-direction noise for the circle sample'
        )
        parser.add_argument(
            '--boundary',
            type=int,
            default=0,
            help='Extra points placed on the boundary of the Moore-space disc'
        )
        parser.add_argument(
            '--q',
            type=int,
            default=3,
            help='Modulus of the Lens space sample'
        )
        parser.add_argument(
            '--out',
            required=True,
            help='Output JSON path'
        )

    def handle(self, *args, **options):
        space = options['space']
        self.stdout.write(f"Sampling {options['points']} points from {space} (seed={options['seed']})...")

        try:
            if space == 'circle':
                dataset = sample_circle(options['points'], options['noise'], options['seed'])
            elif space == 'moore':
                dataset = sample_moore(options['points'], options['seed'], n_boundary=options['boundary'])
            else:
                dataset = sample_lens(options['points'], options['q'], options['seed'])
        except ValueError as e:
            raise as_command_error(e, 'sample', returncode=EXIT_CONFIG_ERROR)

        path = save_dataset(dataset, Path(options['out']))
        self.stdout.write(self.style.SUCCESS(f"✓ Wrote {len(dataset)} points to {path}"))
