from pathlib import Path

from django.core.management.base import BaseCommand
from rest_framework.exceptions import ValidationError

from core.errors import EXIT_CONFIG_ERROR, as_command_error
from Landmarks.serializers import load_landmarks
from LensMap.classifyingMap import (
    DEFAULT_DELTA,
    CoverageFailure,
    InvalidScale,
    LensMapConfig,
    MissingEdge,
    lens_coordinates,
)
from LensMap.serializers import save_cloud
from Persistence.cohomology import PersistenceDiagram
from Persistence.diagrams import NoAdmissibleClass, select_class
from Persistence.serializers import load_cocycles
from Spaces.serializers import load_dataset


class Command(BaseCommand):
    help = 'Map a dataset into a Lens space using a landmark cover and a dim-1 cocycle'

    def add_arguments(self, parser):
        parser.add_argument('--dataset', required=True, help='Dataset JSON')
        parser.add_argument('--landmarks', required=True, help='LandmarkSet JSON')
        parser.add_argument('--cocycles', required=True, help='Cocycles JSON written by `persistence`')
        parser.add_argument(
            '--class-index',
            type=int,
            help='Cocycle to use; defaults to the most persistent class with 2a < b'
        )
        parser.add_argument('--epsilon', type=float, help='Fixed scale instead of the automatic rule')
        parser.add_argument('--delta', type=float, default=DEFAULT_DELTA, help='Offset of the automatic scale rule')
        parser.add_argument('--out', required=True, help='Output LensCloud JSON')

    def handle(self, *args, **options):
        try:
            dataset = load_dataset(options['dataset'])
            landmarks = load_landmarks(options['landmarks'])
            cocycles = load_cocycles(options['cocycles'])
            if not cocycles:
                raise NoAdmissibleClass('The cocycle file holds no dim-1 classes')
            diagram = PersistenceDiagram(dim=1, pairs=[(c.birth, c.death) for c in cocycles])
            if options['class_index'] is None:
                pair, index = select_class(diagram)
            else:
                index = options['class_index']
                if not 0 <= index < len(cocycles):
                    raise InvalidScale(f"Class index {index} out of range for {len(cocycles)} cocycles")
                pair = diagram.pairs[index]
            cocycle = cocycles[index]
            if options['epsilon'] is None:
                config = LensMapConfig.for_class(pair, cocycle.q, delta=options['delta'])
            else:
                config = LensMapConfig(epsilon=options['epsilon'], q=cocycle.q, delta=options['delta'])
        except ValidationError as e:
            raise as_command_error(e, 'lens_map', returncode=EXIT_CONFIG_ERROR)
        except (NoAdmissibleClass, InvalidScale) as e:
            raise as_command_error(e, 'lens_map')

        self.stdout.write(f"Using class {pair} with epsilon={config.epsilon:.8g}")
        try:
            cloud = lens_coordinates(dataset, landmarks, cocycle, config)
        except (CoverageFailure, InvalidScale, MissingEdge) as e:
            raise as_command_error(e, 'lens_map')

        path = save_cloud(cloud, Path(options['out']), config, class_index=index, class_pair=list(pair))
        self.stdout.write(self.style.SUCCESS(f"✓ Wrote {len(cloud)} points of L_{cloud.q}^{cloud.n} to {path}"))
