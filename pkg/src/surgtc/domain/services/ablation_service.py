"""
Module contenant le service d'ablation du module de cohérence temporelle.
"""

from concurrent.futures import Executor
from typing import List, Optional, Sequence

from surgtc.domain.entities.detection_entities import (
    ClassVocabulary,
    FrameDetections,
    SequenceBundle,
)
from surgtc.domain.entities.metric_entities import (
    AblationGrid,
    AblationRow,
    AblationTable,
    MetricReport,
)
from surgtc.domain.entities.temporal_entities import AssignmentStrategy, TemporalConfig
from surgtc.domain.errors import ShapeError
from surgtc.domain.services.metric_service import LabelPair, evaluate, render_semantic
from surgtc.domain.services.temporal_service import correct_sequence


def grid_configs(grid: AblationGrid) -> List[TemporalConfig]:
    """
    Configurations de la grille, seuil d'abord, puis nombre de trames, puis stratégie.
    """
    return [
        TemporalConfig(window_f=frames, iou_threshold_u=threshold, assignment_strategy=strategy)
        for threshold in grid.thresholds
        for frames in grid.frames
        for strategy in grid.strategies
    ]


def label_pairs(bundle: SequenceBundle, frames: Sequence[FrameDetections]) -> List[LabelPair]:
    """Couples (rendu des détections, vérité terrain) d'une séquence."""
    if len(frames) != len(bundle.groundtruth):
        raise ShapeError(
            f"{len(frames)} trames détectées"
            f" pour {len(bundle.groundtruth)} cartes de vérité terrain"
        )
    return [(render_semantic(frame), gt) for frame, gt in zip(frames, bundle.groundtruth)]


def evaluate_config(
    bundles: Sequence[SequenceBundle],
    vocabulary: ClassVocabulary,
    config: Optional[TemporalConfig],
) -> MetricReport:
    """
    Corrige chaque séquence avec la configuration (None: sans correction) et
    évalue l'ensemble.
    """
    pairs: List[LabelPair] = []
    for bundle in bundles:
        frames = bundle.frames
        if config is not None:
            frames = correct_sequence(bundle.frames, bundle.flows, config)
        pairs.extend(label_pairs(bundle, frames))
    return evaluate(pairs, vocabulary)


def ablate(
    bundles: Sequence[SequenceBundle],
    grid: AblationGrid,
    vocabulary: ClassVocabulary,
    executor: Optional[Executor] = None,
) -> AblationTable:
    """
    Évalue chaque cellule de la grille (U x f x stratégie).

    Args:
        bundles: Séquences avec flux et vérité terrain
        grid: Valeurs à croiser
        vocabulary: Classes évaluées
        executor: Pool optionnel; l'ordre des lignes ne dépend pas du pool

    Returns:
        Une ligne par cellule et la référence sans correction
    """
    configs = grid_configs(grid)

    def run(config: Optional[TemporalConfig]) -> MetricReport:
        return evaluate_config(bundles, vocabulary, config)

    if executor is None:
        reports = [run(config) for config in configs]
    else:
        reports = list(executor.map(run, configs))
    rows = [
        AblationRow(
            threshold=config.iou_threshold_u,
            frames=config.window_f,
            strategy=AssignmentStrategy(config.assignment_strategy),
            report=report,
        )
        for config, report in zip(configs, reports)
    ]
    return AblationTable(baseline=run(None), rows=rows)
