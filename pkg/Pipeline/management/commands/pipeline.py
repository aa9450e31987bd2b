from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand

from core.errors import as_command_error
from Pipeline.pipelineManager import ConfigError, PipelineConfig, PipelineStageError
from Pipeline.serializers import DEFAULT_NOISE, SPACE_DEFAULTS
from Pipeline.tasks import run_pipeline_task, seed_sweep


class Command(BaseCommand):
    help = 'Full run: sample, landmarks, cohomology, Lens coordinates, LPCA, domain export, Isomap comparison'

    def add_arguments(self, parser):
        parser.add_argument('--space', required=True, choices=list(SPACE_DEFAULTS), help='Sampled space')
        parser.add_argument('--points', type=int, help='Number of sample points (space default if omitted)')
        parser.add_argument('--landmarks', type=int, help='Number of landmarks (space default if omitted)')
        parser.add_argument('--boundary', type=int, help='Moore space boundary seeds (default 10)')
        parser.add_argument('--q', type=int, default=3, help='Prime modulus of the target Lens space')
        parser.add_argument('--seed', type=int, default=0, help='Random seed')
        parser.add_argument('--noise', type=float, default=DEFAULT_NOISE, help='Circle noise sigma')
        parser.add_argument('--epsilon', type=float, help='Fixed scale; default a + min(delta, (b/2 - a)/2)')
        parser.add_argument('--delta', type=float, default=1e-5, help='Offset above the class birth')
        parser.add_argument('--max-dim', type=int, choices=[2, 3], default=2, help='Top Rips simplex dimension')
        parser.add_argument('--target-dim', type=int, help='Fixed LPCA target dimension')
        parser.add_argument('--tau', type=float, help='Smallest k with pvar >= tau')
        parser.add_argument('--gamma', type=float, help='First k with a pvar gain below gamma')
        parser.add_argument('--knn', type=int, default=8, help='Isomap neighbours')
        parser.add_argument('--isomap-dim', type=int, default=4, help='Isomap embedding dimension')
        parser.add_argument(
            '--no-compare',
            action='store_true',
            help='Skip the Isomap comparison'
        )
        parser.add_argument(
            '--seeds',
            type=int,
            nargs='+',
            help='Run every seed and aggregate into sweep_summary.json'
        )
        parser.add_argument('--out', help='Output directory (default LENS_OUTPUT_DIR/<space>)')

    def options_for(self, options):
        return {
            'space': options['space'],
            'n_points': options['points'],
            'n_landmarks': options['landmarks'],
            'n_boundary': options['boundary'],
            'q': options['q'],
            'seed': options['seed'],
            'noise': options['noise'],
            'epsilon': options['epsilon'],
            'delta': options['delta'],
            'max_dim': options['max_dim'],
            'target_dim': options['target_dim'],
            'tau': options['tau'],
            'gamma': options['gamma'],
            'knn': options['knn'],
            'isomap_dim': options['isomap_dim'],
            'compare': not options['no_compare'],
            'out': options['out'] or str(Path(settings.LENS_OUTPUT_DIR) / options['space']),
        }

    def handle(self, *args, **options):
        try:
            cfg = PipelineConfig.from_options(self.options_for(options))
        except ConfigError as e:
            raise as_command_error(e, 'config')
        config = cfg.as_dict()
        config.pop('epsilon_rule')

        if not options['seeds']:
            try:
                summary = run_pipeline_task.delay(config).get()
            except PipelineStageError as e:
                raise as_command_error(e.cause, e.stage, returncode=e.exit_code)
            self.stdout.write(f"Reported pvar: {summary['pvar']}")
            self.stdout.write(self.style.SUCCESS(f"✓ Pipeline finished, summary in {Path(cfg.out) / 'summary.json'}"))
            return

        try:
            document = seed_sweep(config, options['seeds']).delay().get()
        except PipelineStageError as e:
            raise as_command_error(e.cause, e.stage, returncode=e.exit_code)
        self.stdout.write(f"Mean reported pvar: {document['pvar_mean']}")
        self.stdout.write(
            self.style.SUCCESS(
                f"✓ {document['admissible_count']}/{document['n_runs']} seeds with an admissible class, "
                f"summary in {Path(cfg.out) / 'sweep_summary.json'}"
            )
        )
