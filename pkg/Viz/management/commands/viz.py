from pathlib import Path

from django.core.management.base import BaseCommand
from rest_framework.exceptions import ValidationError

from core.errors import EXIT_CONFIG_ERROR, as_command_error
from Geometry.lensSpace import DimensionMismatch
from LensMap.serializers import load_cloud
from Lpca.serializers import load_lpca
from Viz.exporters import FORMATS, export_cloud
from Viz.fundamentalDomain import NonUnitInput, map_cloud


class Command(BaseCommand):
    help = 'Map P_2 coordinates in L_3^2 into the fundamental domain and write plot-ready points'

    def add_arguments(self, parser):
        source = parser.add_mutually_exclusive_group(required=True)
        source.add_argument('--lpca', help='LpcaResult JSON holding P_2 coordinates')
        source.add_argument('--cloud', help='LensCloud JSON already in L_3^2')
        parser.add_argument('--format', choices=FORMATS, default='csv', help='Output format')
        parser.add_argument('--out', required=True, help='Output file')

    def handle(self, *args, **options):
        try:
            if options['lpca']:
                result = load_lpca(options['lpca'])
                if 2 not in result.coords:
                    raise ValueError("The LPCA file holds no P_2 coordinates; rerun `lpca --coords 2`")
                cloud = result.coords[2]
            else:
                cloud = load_cloud(options['cloud'])
            xyz, sources = map_cloud(cloud)
        except (ValidationError, DimensionMismatch, NonUnitInput, ValueError) as e:
            raise as_command_error(e, 'viz', returncode=EXIT_CONFIG_ERROR)

        path = export_cloud(xyz, Path(options['out']), fmt=options['format'], source_indices=sources)
        self.stdout.write(self.style.SUCCESS(f"✓ Wrote {len(sources)} domain points to {path}"))
