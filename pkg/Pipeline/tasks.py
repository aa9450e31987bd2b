"""
Celery tasks for pipeline runs.

Tasks run eagerly (in process) when no broker is configured, so the `pipeline` command
behaves the same with or without a worker. A seed sweep writes each run under
<out>/seed_<k>/ and the aggregate to <out>/sweep_summary.json.
"""

import logging
import traceback
from pathlib import Path
from typing import Dict, Iterable, List

from celery import chord, shared_task

from core.errors import EXIT_NO_ADMISSIBLE_CLASS
from core.ioUtils import write_json

from .pipelineManager import PipelineStageError, run_pipeline, sweep_summary

logger = logging.getLogger(__name__)


def seed_options(config: Dict, seed: int) -> Dict:
    options = dict(config, seed=seed)
    options['out'] = str(Path(config['out']) / f'seed_{seed}')
    return options


@shared_task
def run_pipeline_task(config: Dict, sweep: bool = False) -> Dict:
    """
    One pipeline run. Inside a sweep, a seed with no admissible class is reported as
    {'seed', 'admissible_class': False} instead of failing the sweep.
    """
    try:
        return run_pipeline(config)
    except PipelineStageError as e:
        if sweep and e.exit_code == EXIT_NO_ADMISSIBLE_CLASS:
            logger.warning(f"Seed {config.get('seed')}: no admissible class ({e})")
            return {'seed': config.get('seed'), 'admissible_class': False}
        logger.error(f"Pipeline failed at stage '{e.stage}': {e}")
        raise
    except Exception as e:
        logger.error(f"Pipeline failed: {e}")
        logger.error(f"Traceback: {traceback.format_exc()}")
        raise


def write_sweep_summary(config: Dict, summaries) -> Dict:
    document = sweep_summary(list(summaries))
    write_json(Path(config['out']) / 'sweep_summary.json', document)
    logger.info(
        f"Sweep over {document['n_runs']} seeds: {document['admissible_count']} with an admissible class"
    )
    return document


@shared_task
def aggregate_sweep_task(summaries: List[Dict], config: Dict) -> Dict:
    return write_sweep_summary(config, summaries)


def seed_sweep(config: Dict, seeds: Iterable[int]) -> chord:
    """One run_pipeline_task per seed, fanned out as a chord whose body writes the aggregate."""
    return chord(
        [run_pipeline_task.s(seed_options(config, seed), sweep=True) for seed in seeds],
        aggregate_sweep_task.s(config),
    )
