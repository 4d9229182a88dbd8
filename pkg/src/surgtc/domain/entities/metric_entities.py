"""
Module contenant les entités des métriques et des tableaux d'ablation.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from surgtc.domain.entities.temporal_entities import AssignmentStrategy


@dataclass(frozen=True)
class MetricReport:
    """
    Métriques de segmentation d'une partition.

    Attributes:
        challenge_iou: IoU restreinte aux classes présentes dans la vérité terrain
        eq1_iou: IoU moyennée sur les classes puis sur les trames
        per_class_iou: IoU par classe (None si jamais définie)
        mean_class_iou: Moyenne des IoU par classe définies
        frames_evaluated: Nombre de paires (prédiction, vérité) évaluées
    """
    challenge_iou: float
    eq1_iou: float
    per_class_iou: Dict[int, Optional[float]]
    mean_class_iou: float
    frames_evaluated: int


@dataclass(frozen=True)
class AblationGrid:
    """Valeurs de U, de f et stratégies à croiser."""
    thresholds: Tuple[float, ...] = (0.0, 0.5)
    frames: Tuple[int, ...] = (3, 5, 7)
    strategies: Tuple[AssignmentStrategy, ...] = (
        AssignmentStrategy.MAX,
        AssignmentStrategy.WEIGHTED_MODE,
    )

    def __len__(self) -> int:
        return len(self.thresholds) * len(self.frames) * len(self.strategies)


@dataclass(frozen=True)
class AblationRow:
    threshold: float
    frames: int
    strategy: AssignmentStrategy
    report: MetricReport


@dataclass(frozen=True)
class AblationTable:
    """
    Résultat d'une ablation: une ligne par cellule, plus la référence
    sans correction.
    """
    baseline: MetricReport
    rows: List[AblationRow] = field(default_factory=list)
