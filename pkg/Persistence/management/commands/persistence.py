from pathlib import Path

import numpy as np
from django.core.management.base import BaseCommand
from rest_framework.exceptions import ValidationError

from core.errors import EXIT_CONFIG_ERROR, as_command_error
from Landmarks.serializers import load_landmarks
from Persistence.cohomology import NotPrime, persistent_cohomology
from Persistence.diagrams import dominant_persistence
from Persistence.rips import AsymmetricInput, build_rips, landmark_distances
from Persistence.serializers import save_persistence
from Spaces.serializers import load_dataset


class Command(BaseCommand):
    help = 'Rips persistent cohomology of the landmarks over each requested prime field'

    def add_arguments(self, parser):
        parser.add_argument('--dataset', required=True, help='Dataset JSON')
        parser.add_argument('--landmarks', required=True, help='LandmarkSet JSON')
        parser.add_argument(
            '--q',
            type=int,
            nargs='+',
            default=[2, 3],
            help='Prime coefficient fields'
        )
        parser.add_argument(
            '--max-dim',
            type=int,
            choices=[2, 3],
            default=2,
            help='Top simplex dimension (3 adds PH^2)'
        )
        parser.add_argument(
            '--max-diameter',
            type=float,
            default=np.inf,
            help='Only simplices of diameter below this value'
        )
        parser.add_argument('--out', required=True, help='Output directory')

    def handle(self, *args, **options):
        out = Path(options['out'])
        try:
            dataset = load_dataset(options['dataset'])
            landmarks = load_landmarks(options['landmarks'])
            distances = landmark_distances(dataset, landmarks.indices)
            complex_ = build_rips(
                distances, max_dim=options['max_dim'], max_diameter=options['max_diameter'],
                vertex_ids=landmarks.indices,
            )
        except (ValidationError, AsymmetricInput, ValueError) as e:
            raise as_command_error(e, 'persistence', returncode=EXIT_CONFIG_ERROR)

        for q in options['q']:
            try:
                result = persistent_cohomology(complex_, q)
            except NotPrime as e:
                raise as_command_error(e, 'persistence', returncode=EXIT_CONFIG_ERROR)
            save_persistence(result, out / f'diagrams_q{q}.json', out / f'cocycles_q{q}.json')
            self.stdout.write(
                self.style.SUCCESS(
                    f"✓ Z_{q}: {len(result.diagrams[1])} dim-1 pairs, "
                    f"dominant persistence {dominant_persistence(result.diagrams[1]):.6g}"
                )
            )
