from pathlib import Path

from django.core.management.base import BaseCommand
from rest_framework.exceptions import ValidationError

from core.errors import EXIT_CONFIG_ERROR, as_command_error
from LensMap.serializers import load_cloud
from Lpca.lensPca import EmptyCloud, choose_dim, lpca, variance_table_row
from Lpca.serializers import save_lpca


class Command(BaseCommand):
    help = 'Run Lens PCA on a LensCloud JSON and store components, variance profile and coordinates'

    def add_arguments(self, parser):
        parser.add_argument('--cloud', required=True, help='LensCloud JSON written by `lens_map`')
        parser.add_argument(
            '--coords',
            type=int,
            nargs='+',
            default=[2],
            help='Dimensions k for which P_k is stored'
        )
        parser.add_argument('--tau', type=float, help='Pick the target dimension by a variance threshold')
        parser.add_argument('--gamma', type=float, help='Pick the target dimension by a variance gap')
        parser.add_argument('--out', required=True, help='Output LpcaResult JSON')

    def handle(self, *args, **options):
        if options['tau'] is not None and options['gamma'] is not None:
            raise as_command_error(ValueError('Pass at most one of --tau and --gamma'), 'lpca',
                                   returncode=EXIT_CONFIG_ERROR)
        try:
            cloud = load_cloud(options['cloud'])
            result = lpca(cloud)
        except ValidationError as e:
            raise as_command_error(e, 'lpca', returncode=EXIT_CONFIG_ERROR)
        except (EmptyCloud, ValueError) as e:
            raise as_command_error(e, 'lpca')

        dims = list(options['coords'])
        extra = {}
        if options['tau'] is not None or options['gamma'] is not None:
            target = choose_dim(result.reported_pvar, tau=options['tau'], gamma=options['gamma'])
            extra['target_dim'] = target
            dims.append(target)
        invalid = [k for k in dims if not 1 <= k <= result.n]
        if invalid:
            raise as_command_error(
                ValueError(f"Coordinates exist for k = 1..{result.n}, got {invalid}"), 'lpca',
                returncode=EXIT_CONFIG_ERROR,
            )

        path = save_lpca(result, Path(options['out']), coord_dims=dims, **extra)
        row = variance_table_row(result.reported_pvar)
        self.stdout.write('  '.join(f"{name}: {'-' if value is None else value}" for name, value in row.items()))
        self.stdout.write(self.style.SUCCESS(f"✓ Wrote LPCA of {len(cloud)} points in L_{cloud.q}^{result.n} to {path}"))
