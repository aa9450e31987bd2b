import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase, override_settings, tag

from core.errors import EXIT_CONFIG_ERROR, EXIT_COVERAGE_FAILURE, EXIT_NO_ADMISSIBLE_CLASS
from core.ioUtils import read_json
from LensMap.classifyingMap import CoverageFailure
from Persistence.diagrams import NoAdmissibleClass

from .models import PipelineRun
from .pipelineManager import (
    ConfigError,
    PipelineConfig,
    PipelineStageError,
    REFERENCE_PVAR,
    run_pipeline,
    sweep_summary,
)
from .serializers import PipelineConfigSerializer
from .tasks import aggregate_sweep_task, run_pipeline_task, seed_sweep


def small_circle(out, **overrides):
    options = {
        'space': 'circle',
        'n_points': 200,
        'n_landmarks': 12,
        'noise': 0.05,
        'seed': 3,
        'isomap_dim': 2,
        'out': str(out),
    }
    options.update(overrides)
    return options


class PipelineConfigTests(TestCase):

    def test_space_defaults(self):
        cfg = PipelineConfig.from_options({'space': 'moore', 'out': 'x'})
        self.assertEqual((cfg.n_points, cfg.n_landmarks, cfg.n_boundary), (3000, 70, 10))
        self.assertEqual(cfg.q, 3)
        self.assertEqual(cfg.epsilon_rule, 'auto')
        self.assertEqual(cfg.fields, [2, 3])

    def test_fixed_epsilon(self):
        cfg = PipelineConfig.from_options({'space': 'lens', 'epsilon': 0.5, 'q': 5, 'out': 'x'})
        self.assertEqual(cfg.epsilon_rule, 'fixed')
        self.assertEqual(cfg.fields, [2, 5])
        self.assertNotIn('out', cfg.as_dict(include_out=False))

    def test_rejects_bad_options(self):
        for options in (
            {'space': 'circle', 'q': 4},
            {'space': 'circle', 'q': 2},
            {'space': 'circle', 'n_boundary': 3},
            {'space': 'circle', 'tau': 0.8, 'gamma': 0.01},
            {'space': 'circle', 'epsilon': 0.0},
            {'space': 'circle', 'n_points': 5, 'n_landmarks': 10},
            {'space': 'torus'},
        ):
            serializer = PipelineConfigSerializer(data=dict(options, out='x'))
            self.assertFalse(serializer.is_valid(), options)
        with self.assertRaises(ConfigError):
            PipelineConfig.from_options({'space': 'circle', 'q': 9, 'out': 'x'})


class PipelineRunTests(TestCase):

    def test_summary_is_deterministic(self):
        with tempfile.TemporaryDirectory() as tmp:
            tmp = Path(tmp)
            first = run_pipeline(small_circle(tmp / 'a'), record=False)
            second = run_pipeline(small_circle(tmp / 'b'), record=False)
            self.assertEqual(
                (tmp / 'a' / 'summary.json').read_bytes(),
                (tmp / 'b' / 'summary.json').read_bytes(),
            )
            for name in first['files']:
                self.assertTrue((tmp / 'a' / name).exists(), name)
        self.assertEqual(first, second)
        self.assertTrue(first['admissible_class'])
        self.assertIn('domain.csv', first['files'])
        self.assertIn('comparison.txt', first['files'])

    def test_summary_content(self):
        with tempfile.TemporaryDirectory() as tmp:
            summary = run_pipeline(small_circle(tmp, compare=False, target_dim=3), record=False)
            lpca = read_json(Path(tmp) / 'lpca.json')
        birth, death = summary['class']['pair']
        self.assertLess(2 * birth, death)
        self.assertIs(summary['admissible_class'], True)
        self.assertGreaterEqual(summary['class']['epsilon'], birth)
        self.assertLess(2 * summary['class']['epsilon'], death)
        self.assertEqual(summary['target_dim'], 3)
        self.assertEqual(sorted(lpca['coords']), ['1', '2', '3'])
        self.assertIsNone(summary['comparison'])
        pvar = summary['pvar']
        self.assertTrue(all(0 <= p <= 1 + 1e-9 for p in pvar))
        self.assertTrue(all(a <= b + 1e-9 for a, b in zip(pvar, pvar[1:])))
        self.assertEqual(set(summary['per_ratios']), {'Z_2', 'Z_3'})

    def test_ledger_records_every_stage(self):
        with tempfile.TemporaryDirectory() as tmp:
            run_pipeline(small_circle(tmp), record=True)
        run = PipelineRun.objects.get()
        self.assertEqual(run.status, 'success')
        self.assertEqual(run.exit_code, 0)
        self.assertEqual(
            [log.stage for log in run.logs.all()],
            ['sample', 'landmarks', 'persistence', 'class', 'lens_map', 'lpca', 'viz', 'isomap'],
        )
        self.assertIn('lens_map', run.timings)

    def test_coverage_failure(self):
        with tempfile.TemporaryDirectory() as tmp:
            with mock.patch('Pipeline.pipelineManager.lens_coordinates', side_effect=CoverageFailure([0], 0.1)):
                with self.assertRaises(PipelineStageError) as ctx:
                    run_pipeline(small_circle(tmp), record=True)
            self.assertTrue((Path(tmp) / 'timings.json').exists())
            self.assertFalse((Path(tmp) / 'summary.json').exists())
        self.assertEqual(ctx.exception.stage, 'lens_map')
        self.assertEqual(ctx.exception.exit_code, EXIT_COVERAGE_FAILURE)
        run = PipelineRun.objects.get()
        self.assertEqual((run.status, run.failed_stage, run.exit_code), ('failed', 'lens_map', EXIT_COVERAGE_FAILURE))

    def test_sweep_skips_seeds_without_admissible_class(self):
        with tempfile.TemporaryDirectory() as tmp:
            with mock.patch('Pipeline.pipelineManager.select_class', side_effect=NoAdmissibleClass('none')):
                result = run_pipeline_task(small_circle(tmp), sweep=True)
                document = seed_sweep(small_circle(tmp, compare=False), [1, 2]).delay().get()
            self.assertTrue((Path(tmp) / 'sweep_summary.json').exists())
            self.assertTrue((Path(tmp) / 'seed_1' / 'landmarks.json').exists())
        self.assertEqual(result, {'seed': 3, 'admissible_class': False})
        self.assertEqual(document['admissible_count'], 0)
        self.assertEqual(document['seeds'], [1, 2])

    def test_seed_sweep_is_one_task_per_seed(self):
        sweep = seed_sweep(small_circle('runs'), [4, 5, 6])
        header = list(sweep.tasks)
        self.assertEqual([task.task for task in header], [run_pipeline_task.name] * 3)
        self.assertEqual([task.args[0]['seed'] for task in header], [4, 5, 6])
        self.assertEqual([task.args[0]['out'] for task in header],
                         [str(Path('runs') / f'seed_{seed}') for seed in (4, 5, 6)])
        self.assertTrue(all(task.kwargs == {'sweep': True} for task in header))
        self.assertEqual(sweep.body.task, aggregate_sweep_task.name)


def run_or_failure(options):
    try:
        return run_pipeline(options, record=False)
    except PipelineStageError as e:
        return {'failed_stage': e.stage, 'exit_code': e.exit_code}


class NonCircleRunTests(TestCase):

    def test_moore_and_lens_runs_are_deterministic(self):
        for space in ('moore', 'lens'):
            with tempfile.TemporaryDirectory() as tmp:
                tmp = Path(tmp)
                options = {'space': space, 'n_points': 400, 'n_landmarks': 20, 'seed': 2, 'compare': False}
                first = run_or_failure(dict(options, out=str(tmp / 'a')))
                second = run_or_failure(dict(options, out=str(tmp / 'b')))
                self.assertEqual(first, second, space)
                written = sorted(p.name for p in (tmp / 'a').iterdir() if p.name != 'timings.json')
                self.assertIn('diagrams_q3.json', written)
                for name in written:
                    self.assertEqual((tmp / 'a' / name).read_bytes(), (tmp / 'b' / name).read_bytes(), (space, name))

    @tag('slow')
    def test_moore_at_forty_landmarks_has_no_admissible_class(self):
        with tempfile.TemporaryDirectory() as tmp:
            options = {'space': 'moore', 'n_points': 1500, 'n_landmarks': 40, 'seed': 0, 'compare': False, 'out': tmp}
            with self.assertRaises(PipelineStageError) as ctx:
                run_pipeline(options, record=False)
            self.assertTrue((Path(tmp) / 'diagrams_q2.json').exists())
        self.assertEqual(ctx.exception.stage, 'class')
        self.assertEqual(ctx.exception.exit_code, EXIT_NO_ADMISSIBLE_CLASS)


class SweepSummaryTests(TestCase):

    def test_aggregates(self):
        config = {'space': 'circle', 'seed': 0}
        summaries = [
            {'config': dict(config, seed=0), 'admissible_class': True, 'pvar': [0.6, 0.8], 'torsion_ratio': 1.0,
             'comparison': {'lc_beats_isomap': {'2': True, '3': False}}},
            {'config': dict(config, seed=1), 'admissible_class': True, 'pvar': [0.4, 0.6], 'torsion_ratio': 1.0,
             'comparison': {'lc_beats_isomap': {'2': True, '3': True}}},
            {'seed': 2, 'admissible_class': False},
        ]
        document = sweep_summary(summaries)
        self.assertEqual(document['n_runs'], 3)
        self.assertEqual(document['admissible_count'], 2)
        self.assertEqual(document['seeds'], [0, 1, 2])
        self.assertEqual(document['pvar_mean'], [0.5, 0.7])
        self.assertEqual(document['pvar_std'], [0.1, 0.1])
        self.assertEqual(document['lc_beats_isomap'], {'2': 2, '3': 1})
        self.assertEqual(document['reference_pvar'], REFERENCE_PVAR['circle'])

    def test_empty(self):
        with self.assertRaises(ValueError):
            sweep_summary([])


class PipelineCommandTests(TestCase):

    def run_command(self, tmp, **options):
        defaults = {'space': 'circle', 'points': 200, 'landmarks': 12, 'noise': 0.05, 'seed': 3,
                    'isomap_dim': 2, 'out': str(tmp)}
        defaults.update(options)
        stdout = StringIO()
        call_command('pipeline', stdout=stdout, **defaults)
        return stdout.getvalue()

    def test_run(self):
        with tempfile.TemporaryDirectory() as tmp:
            output = self.run_command(tmp)
            summary = read_json(Path(tmp) / 'summary.json')
        self.assertIn('Pipeline finished', output)
        self.assertTrue(summary['admissible_class'])

    def test_output_defaults_to_lens_output_dir(self):
        with tempfile.TemporaryDirectory() as tmp:
            with override_settings(LENS_OUTPUT_DIR=Path(tmp)):
                self.run_command(tmp, out=None, no_compare=True)
            self.assertTrue((Path(tmp) / 'circle' / 'summary.json').exists())

    def test_non_prime_q(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(CommandError) as ctx:
                self.run_command(tmp, q=4)
        self.assertEqual(ctx.exception.returncode, EXIT_CONFIG_ERROR)

    def test_no_admissible_class(self):
        with tempfile.TemporaryDirectory() as tmp:
            with mock.patch('Pipeline.pipelineManager.select_class', side_effect=NoAdmissibleClass('none')):
                with self.assertRaises(CommandError) as ctx:
                    self.run_command(tmp, no_compare=True)
        self.assertEqual(ctx.exception.returncode, EXIT_NO_ADMISSIBLE_CLASS)
        self.assertIn('[class]', str(ctx.exception))

    def test_coverage_failure(self):
        with tempfile.TemporaryDirectory() as tmp:
            with mock.patch('Pipeline.pipelineManager.lens_coordinates', side_effect=CoverageFailure([4], 0.2)):
                with self.assertRaises(CommandError) as ctx:
                    self.run_command(tmp, no_compare=True)
        self.assertEqual(ctx.exception.returncode, EXIT_COVERAGE_FAILURE)

    def test_seed_sweep(self):
        with tempfile.TemporaryDirectory() as tmp:
            output = self.run_command(tmp, seeds=[0, 1], no_compare=True)
            document = read_json(Path(tmp) / 'sweep_summary.json')
        self.assertIn('seeds with an admissible class', output)
        self.assertEqual(document['n_runs'], 2)


@tag('slow')
class FullScaleTests(TestCase):

    def test_circle_defaults(self):
        with tempfile.TemporaryDirectory() as tmp:
            summary = run_pipeline({'space': 'circle', 'out': tmp}, record=False)
        self.assertTrue(summary['admissible_class'])
        self.assertEqual(summary['n_points'], 2000)
        self.assertEqual(summary['n_landmarks'], 10)
        self.assertGreater(summary['per_ratios']['Z_3'] or float('inf'), 2.0)
        self.assertEqual(summary['config']['noise'], 0.05)

    def test_circle_sweep_over_five_seeds(self):
        with tempfile.TemporaryDirectory() as tmp:
            document = seed_sweep({'space': 'circle', 'compare': False, 'out': tmp}, range(5)).delay().get()
        self.assertEqual(document['admissible_count'], 5)
        mean = document['pvar_mean']
        # first reduced dimension carries about 0.38, two components about 0.62
        self.assertTrue(0.25 <= mean[0] <= 0.55, mean)
        self.assertLess(abs(mean[1] - REFERENCE_PVAR['circle'][0]), 0.15)
        self.assertTrue(all(a <= b + 1e-9 for a, b in zip(mean, mean[1:])), mean)
