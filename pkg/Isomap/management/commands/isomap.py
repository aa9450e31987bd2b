from pathlib import Path

from django.core.management.base import BaseCommand
from rest_framework.exceptions import ValidationError

from core.errors import EXIT_CONFIG_ERROR, as_command_error
from Isomap.comparison import compare_per_ratio
from Isomap.isomap import (
    DEFAULT_K_NEIGHBORS,
    DEFAULT_TARGET_DIM,
    DisconnectedGraph,
    InvalidIsomapConfig,
    IsomapConfig,
    isomap,
)
from Isomap.serializers import save_comparison, save_embedding
from Landmarks.serializers import load_landmarks
from Lpca.serializers import load_lpca
from Persistence.cohomology import NotPrime
from Spaces.serializers import load_dataset


class Command(BaseCommand):
    help = 'Isomap embedding of a dataset, optionally compared with Lens coordinates by per_1/per_2'

    def add_arguments(self, parser):
        parser.add_argument('--dataset', required=True, help='Dataset JSON')
        parser.add_argument('--knn', type=int, default=DEFAULT_K_NEIGHBORS, help='Neighbours per point')
        parser.add_argument('--target-dim', type=int, default=DEFAULT_TARGET_DIM, help='Embedding dimension')
        parser.add_argument('--landmarks', help='LandmarkSet JSON; with --lpca, writes the comparison table')
        parser.add_argument('--lpca', help='LpcaResult JSON holding the Lens-side coordinates')
        parser.add_argument('--lens-dim', type=int, default=2, help='P_k used on the Lens side')
        parser.add_argument(
            '--q',
            type=int,
            nargs='+',
            default=[2, 3],
            help='Prime fields for the comparison'
        )
        parser.add_argument('--out', required=True, help='Output directory')

    def handle(self, *args, **options):
        out = Path(options['out'])
        compare = bool(options['landmarks'] and options['lpca'])
        try:
            dataset = load_dataset(options['dataset'])
            cfg = IsomapConfig(k_neighbors=options['knn'], target_dim=options['target_dim'])
            cfg.validate()
            if compare:
                landmarks = load_landmarks(options['landmarks'])
                result = load_lpca(options['lpca'])
                if options['lens_dim'] not in result.coords:
                    raise InvalidIsomapConfig(
                        f"The LPCA file holds no P_{options['lens_dim']}; stored: {sorted(result.coords)}"
                    )
        except (ValidationError, InvalidIsomapConfig) as e:
            raise as_command_error(e, 'isomap', returncode=EXIT_CONFIG_ERROR)

        try:
            embedding = isomap(dataset, cfg)
        except DisconnectedGraph as e:
            raise as_command_error(e, 'isomap')
        path = save_embedding(embedding, out / 'embedding.json')
        self.stdout.write(self.style.SUCCESS(f"✓ Wrote Isomap embedding of {len(embedding)} points to {path}"))

        if not compare:
            return
        try:
            comparison = compare_per_ratio(
                dataset, landmarks, options['q'], cfg, result.coords[options['lens_dim']], embedding=embedding
            )
        except NotPrime as e:
            raise as_command_error(e, 'isomap', returncode=EXIT_CONFIG_ERROR)
        _, text_path = save_comparison(comparison, out)
        self.stdout.write(comparison.to_text())
        self.stdout.write(self.style.SUCCESS(f"✓ Wrote comparison table to {text_path}"))
