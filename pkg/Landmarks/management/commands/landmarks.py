from pathlib import Path

from django.core.management.base import BaseCommand
from rest_framework.exceptions import ValidationError

from core.errors import EXIT_CONFIG_ERROR, as_command_error
from Landmarks.selection import InvalidLandmarkRequest, maxmin_landmarks, random_landmarks
from Landmarks.serializers import save_landmarks
from Spaces.serializers import load_dataset


class Command(BaseCommand):
    help = 'Select landmarks from a dataset JSON by maxmin or at random'

    def add_arguments(self, parser):
        parser.add_argument('--dataset', required=True, help='Dataset JSON written by `sample`')
        parser.add_argument('--landmarks', type=int, required=True, help='Number of landmarks')
        parser.add_argument(
            '--method',
            choices=['maxmin', 'random'],
            default='maxmin',
            help='Selection rule'
        )
        parser.add_argument(
            '--seed-indices',
            type=int,
            nargs='+',
            help='Initial maxmin landmarks, in order'
        )
        parser.add_argument(
            '--seed-boundary',
            action='store_true',
            help='Seed maxmin with the boundary points recorded in the dataset metadata'
        )
        parser.add_argument('--seed', type=int, default=0, help='Random seed')
        parser.add_argument('--out', required=True, help='Output JSON path')

    def handle(self, *args, **options):
        try:
            dataset = load_dataset(options['dataset'])
            seeds = options['seed_indices']
            if options['seed_boundary']:
                seeds = dataset.metadata.get('boundary_indices', [])
            if options['method'] == 'maxmin':
                landmarks = maxmin_landmarks(dataset, options['landmarks'], seeds=seeds, rng_seed=options['seed'])
            else:
                landmarks = random_landmarks(dataset, options['landmarks'], rng_seed=options['seed'])
        except (ValidationError, InvalidLandmarkRequest) as e:
            raise as_command_error(e, 'landmarks', returncode=EXIT_CONFIG_ERROR)

        path = save_landmarks(landmarks, Path(options['out']))
        self.stdout.write(
            self.style.SUCCESS(
                f"✓ Wrote {len(landmarks)} landmarks (cover radius {landmarks.cover_radius:.6g}) to {path}"
            )
        )
