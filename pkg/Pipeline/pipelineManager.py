"""
End-to-end pipeline: sample -> landmarks -> persistent cohomology over Z_2 and Z_q ->
class selection -> Lens coordinates -> LPCA -> fundamental-domain export -> Isomap
comparison. Every stage writes its document into the output directory before the next
stage starts; summary.json holds only deterministic content, timings go to timings.json
and the run ledger.
"""

import logging
import time
import traceback
from contextlib import contextmanager
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd
from django.conf import settings
from django.db import DatabaseError

from core.errors import EXIT_CONFIG_ERROR, exit_code_for
from core.ioUtils import read_json, write_json
from Isomap.comparison import compare_per_ratio
from Isomap.isomap import IsomapConfig, isomap
from Isomap.serializers import save_comparison, save_embedding
from Landmarks.selection import maxmin_landmarks
from Landmarks.serializers import save_landmarks
from LensMap.classifyingMap import DEFAULT_DELTA, LensMapConfig, lens_coordinates
from LensMap.serializers import save_cloud
from Lpca.lensPca import PVAR_CONVENTION, TABLE_DIMS, choose_dim, lpca, variance_table_row
from Lpca.serializers import save_lpca
from Persistence.cohomology import persistent_cohomology
from Persistence.diagrams import EmptyDiagram, dominant_persistence, per_ratio, select_class
from Persistence.rips import build_rips, landmark_distances
from Persistence.serializers import save_persistence
from Spaces.samplers import sample_circle, sample_lens, sample_moore
from Spaces.serializers import save_dataset
from Viz.exporters import export_cloud
from Viz.fundamentalDomain import DOMAIN_Q, map_cloud

from .models import PipelineRun, StageLog
from .serializers import DEFAULT_NOISE, PipelineConfigSerializer

logger = logging.getLogger(__name__)

DEFAULT_TARGET_DIM = 2
SPACE_LABELS = {'circle': 'S^1', 'moore': 'M(Z_3,1)', 'lens': 'L_3^2'}

# Full-scale reference values: reported pvar for dims 1..5, and per_1/per_2 of the dim-1
# diagrams (Isomap, Lens coordinates) over Z_2 and Z_3.
REFERENCE_PVAR = {
    'circle': [0.62, 0.75, 0.81, 0.86, 0.89],
    'moore': [0.56, 0.70, 0.76, 0.80, 0.83],
    'lens': [0.47, 0.62, 0.67, 0.71, 0.73],
}
REFERENCE_PER_RATIOS = {
    'moore': {'Isomap': {'Z_2': 1.0105, 'Z_3': 1.0105}, 'Lens coordinates': {'Z_2': 1.7171, 'Z_3': 3.6789}},
    'lens': {'Isomap': {'Z_2': 1.0080, 'Z_3': 1.0080}, 'Lens coordinates': {'Z_2': 1.1592, 'Z_3': 2.8072}},
}


class ConfigError(ValueError):
    exit_code = EXIT_CONFIG_ERROR


class PipelineStageError(RuntimeError):
    """A stage failed; carries the stage name and the exit code of the cause."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        self.exit_code = exit_code_for(cause)
        super().__init__(f"{type(cause).__name__}: {cause}")


@dataclass
class PipelineConfig:
    space: str
    out: str
    n_points: int
    n_landmarks: int
    n_boundary: int = 0
    q: int = 3
    seed: int = 0
    noise: float = DEFAULT_NOISE
    epsilon: Optional[float] = None
    delta: float = DEFAULT_DELTA
    max_dim: int = 2
    target_dim: Optional[int] = None
    tau: Optional[float] = None
    gamma: Optional[float] = None
    knn: int = 8
    isomap_dim: int = 4
    compare: bool = True

    @classmethod
    def from_options(cls, options: Dict) -> 'PipelineConfig':
        serializer = PipelineConfigSerializer(data=options)
        if not serializer.is_valid():
            raise ConfigError(f"Invalid pipeline configuration: {serializer.errors}")
        return cls(**serializer.validated_data)

    @property
    def epsilon_rule(self) -> str:
        return 'auto' if self.epsilon is None else 'fixed'

    @property
    def fields(self) -> List[int]:
        return sorted({2, self.q})

    def as_dict(self, include_out: bool = True) -> Dict:
        data = asdict(self)
        if not include_out:
            data.pop('out')
        data['epsilon_rule'] = self.epsilon_rule
        return data


class PipelineManager:
    """Runs the stages in order and keeps the ledger of one run."""

    def __init__(self, cfg: PipelineConfig, record: Optional[bool] = None):
        self.cfg = cfg
        self.out = Path(cfg.out)
        self.timings: Dict[str, float] = {}
        self.files: List[str] = []
        record = settings.LENS_RECORD_RUNS if record is None else record
        self.ledger = self._open_ledger() if record else None

    # ------------------------------------------------------------------
    # Run ledger (best effort)
    # ------------------------------------------------------------------

    def _open_ledger(self) -> Optional[PipelineRun]:
        try:
            run = PipelineRun.objects.create(
                space=self.cfg.space,
                seed=self.cfg.seed,
                q=self.cfg.q,
                config=self.cfg.as_dict(),
                output_dir=str(self.out),
            )
            run.mark_processing()
            return run
        except DatabaseError as e:
            logger.warning(f"Run ledger unavailable, continuing without it: {e}")
            return None

    def _record(self, action, *args, **kwargs):
        if self.ledger is None:
            return
        try:
            action(*args, **kwargs)
        except DatabaseError as e:
            logger.warning(f"Could not update the run ledger: {e}")

    def _log_stage(self, stage: str, level: str, message: str, duration: float, details: Dict = None):
        self._record(
            StageLog.objects.create,
            run=self.ledger, stage=stage, level=level, message=message,
            duration=duration, details=details or {},
        )

    @contextmanager
    def stage(self, name: str):
        logger.info(f"Stage '{name}' started")
        start = time.perf_counter()
        try:
            yield
        except Exception as e:
            elapsed = time.perf_counter() - start
            self.timings[name] = elapsed
            logger.error(f"Stage '{name}' failed: {e}")
            logger.error(f"Traceback: {traceback.format_exc()}")
            failure = PipelineStageError(name, e)
            self._log_stage(name, 'ERROR', str(failure), elapsed, {'exception': type(e).__name__})
            self._record(lambda: self.ledger.mark_failed(name, str(failure), failure.exit_code, self.timings))
            write_json(self.out / 'timings.json', self.timings)
            raise failure from e
        elapsed = time.perf_counter() - start
        self.timings[name] = elapsed
        self._log_stage(name, 'INFO', 'completed', elapsed)
        logger.info(f"Stage '{name}' completed in {elapsed:.2f}s")

    def _write(self, name: str, writer, *args, **kwargs):
        path = writer(*args, **kwargs)
        self.files.append(name)
        return path

    # ------------------------------------------------------------------
    # Stages
    # ------------------------------------------------------------------

    def _sample(self):
        cfg = self.cfg
        if cfg.space == 'circle':
            return sample_circle(cfg.n_points, cfg.noise, cfg.seed)
        if cfg.space == 'moore':
            return sample_moore(cfg.n_points, cfg.seed, n_boundary=cfg.n_boundary)
        return sample_lens(cfg.n_points, cfg.q, cfg.seed)

    def _target_dim(self, result) -> int:
        cfg = self.cfg
        if cfg.target_dim is not None:
            return cfg.target_dim
        if cfg.tau is not None or cfg.gamma is not None:
            return choose_dim(result.reported_pvar, tau=cfg.tau, gamma=cfg.gamma)
        return min(DEFAULT_TARGET_DIM, result.n)

    @staticmethod
    def _check_cocycles(result, complex_):
        for index, cocycle in enumerate(result.cocycles):
            bad = cocycle.violations(complex_)
            if bad:
                raise RuntimeError(
                    f"Cocycle {index} over Z_{result.q} breaks the cocycle condition on {len(bad)} triangles"
                )

    @staticmethod
    def _per_ratio(dgm):
        try:
            return per_ratio(dgm)
        except EmptyDiagram:
            return None

    def execute(self) -> Dict:
        cfg, out = self.cfg, self.out
        logger.info(f"Pipeline on {cfg.space} (seed={cfg.seed}, q={cfg.q}) writing to {out}")

        with self.stage('sample'):
            dataset = self._sample()
            self._write('dataset.json', save_dataset, dataset, out / 'dataset.json')

        with self.stage('landmarks'):
            seeds = dataset.metadata.get('boundary_indices') or None
            landmarks = maxmin_landmarks(dataset, cfg.n_landmarks, seeds=seeds, rng_seed=cfg.seed)
            landmarks.validate(dataset)
            self._write('landmarks.json', save_landmarks, landmarks, out / 'landmarks.json')

        with self.stage('persistence'):
            complex_ = build_rips(
                landmark_distances(dataset, landmarks.indices), max_dim=cfg.max_dim, vertex_ids=landmarks.indices
            )
            results = {}
            for field in cfg.fields:
                result = results[field] = self._persistence(complex_, field)
                self._check_cocycles(result, complex_)

        with self.stage('class'):
            result = results[cfg.q]
            pair, index = select_class(result.diagrams[1])
            cocycle = result.cocycles[index]
            if cfg.epsilon is None:
                lens_cfg = LensMapConfig.for_class(pair, cfg.q, delta=cfg.delta)
            else:
                lens_cfg = LensMapConfig(epsilon=cfg.epsilon, q=cfg.q, delta=cfg.delta)
            lens_cfg.validate(cocycle)
            selected = {
                'q': cfg.q,
                'index': index,
                'pair': list(pair),
                'epsilon': lens_cfg.epsilon,
                'epsilon_rule': cfg.epsilon_rule,
            }
            self._write('class.json', write_json, out / 'class.json', selected)

        with self.stage('lens_map'):
            cloud = lens_coordinates(dataset, landmarks, cocycle, lens_cfg)
            self._write(
                'lens_cloud.json', save_cloud, cloud, out / 'lens_cloud.json', lens_cfg,
                class_index=index, class_pair=list(pair),
            )

        with self.stage('lpca'):
            reduction = lpca(cloud)
            target = self._target_dim(reduction)
            dims = sorted({1, min(2, reduction.n), target})
            self._write('lpca.json', save_lpca, reduction, out / 'lpca.json', coord_dims=dims, target_dim=target)
            row = variance_table_row(reduction.reported_pvar)
            table = pd.DataFrame([row], index=[SPACE_LABELS[cfg.space]])
            (out / 'variance_table.txt').write_text(table.to_string(na_rep='-') + '\n', encoding='utf-8')
            self.files.append('variance_table.txt')

        if cfg.q == DOMAIN_Q:
            with self.stage('viz'):
                xyz, sources = map_cloud(reduction.coordinates(2))
                self._write('domain.csv', export_cloud, xyz, out / 'domain.csv', source_indices=sources)

        comparison = None
        if cfg.compare:
            with self.stage('isomap'):
                iso_cfg = IsomapConfig(k_neighbors=cfg.knn, target_dim=cfg.isomap_dim)
                embedding = isomap(dataset, iso_cfg)
                self._write('isomap_embedding.json', save_embedding, embedding, out / 'isomap_embedding.json')
                comparison = compare_per_ratio(
                    dataset, landmarks, cfg.fields, iso_cfg, reduction.coordinates(min(2, reduction.n)),
                    embedding=embedding,
                )
                save_comparison(comparison, out)
                self.files.extend(['comparison.json', 'comparison.txt'])

        dominant = {f"Z_{f}": dominant_persistence(results[f].diagrams[1]) for f in cfg.fields}
        summary = {
            'config': cfg.as_dict(include_out=False),
            'admissible_class': 2 * pair[0] < pair[1],
            'n_points': len(dataset),
            'n_landmarks': len(landmarks),
            'cover_radius': landmarks.cover_radius,
            'class': selected,
            'coverage': cloud.coverage,
            'pvar': reduction.reported_pvar[:TABLE_DIMS],
            'pvar_convention': PVAR_CONVENTION,
            'variance_row': row,
            'target_dim': target,
            'zero_vector_count': reduction.zero_vector_count,
            'per_ratios': {f"Z_{f}": self._per_ratio(results[f].diagrams[1]) for f in cfg.fields},
            'dominant_persistence': dominant,
            'torsion_ratio': dominant[f"Z_{cfg.q}"] / dominant['Z_2'] if dominant['Z_2'] > 0 else None,
            'comparison': comparison.as_document() if comparison else None,
            'files': sorted(self.files),
        }
        summary_path = write_json(out / 'summary.json', summary)
        write_json(out / 'timings.json', self.timings)
        summary = read_json(summary_path)
        self._record(lambda: self.ledger.mark_success(summary, self.timings))
        logger.info(f"Pipeline finished: reported pvar {summary['pvar']}")
        return summary

    def _persistence(self, complex_, field: int):
        result = persistent_cohomology(complex_, field)
        self._write(
            f'diagrams_q{field}.json', save_persistence, result,
            self.out / f'diagrams_q{field}.json', self.out / f'cocycles_q{field}.json',
        )
        self.files.append(f'cocycles_q{field}.json')
        return result


def run_pipeline(cfg, record: Optional[bool] = None) -> Dict:
    """Accepts a PipelineConfig or a plain options dict; returns the summary document."""
    if not isinstance(cfg, PipelineConfig):
        cfg = PipelineConfig.from_options(cfg)
    return PipelineManager(cfg, record=record).execute()


def sweep_summary(summaries: List[Dict]) -> Dict:
    """Aggregates per-seed summaries: pvar mean/std, admissible-class and comparison counts."""
    if not summaries:
        raise ValueError("No runs to summarise")
    admissible = [s for s in summaries if s.get('admissible_class')]
    document = {
        'n_runs': len(summaries),
        'seeds': sorted(s['config']['seed'] if 'config' in s else s['seed'] for s in summaries),
        'admissible_count': len(admissible),
        'pvar_mean': None,
        'pvar_std': None,
        'torsion_ratios': [],
        'lc_beats_isomap': {},
    }
    if not admissible:
        return document

    space = admissible[0]['config']['space']
    pvar = pd.DataFrame([s['pvar'] for s in admissible])
    document['pvar_mean'] = pvar.mean(axis=0).round(4).tolist()
    document['pvar_std'] = pvar.std(axis=0, ddof=0).round(4).tolist()
    document['torsion_ratios'] = [s['torsion_ratio'] for s in admissible]
    if space in REFERENCE_PVAR:
        document['reference_pvar'] = REFERENCE_PVAR[space]
    if space in REFERENCE_PER_RATIOS:
        document['reference_per_ratios'] = REFERENCE_PER_RATIOS[space]

    counts: Dict[str, int] = {}
    for s in admissible:
        if not s.get('comparison'):
            continue
        for q, wins in s['comparison']['lc_beats_isomap'].items():
            counts[q] = counts.get(q, 0) + int(bool(wins))
    document['lc_beats_isomap'] = counts
    return document
