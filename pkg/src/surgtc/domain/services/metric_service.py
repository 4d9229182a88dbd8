"""
Module contenant les métriques de segmentation sémantique.

Trois variantes de l'IoU, de la moins à la plus exigeante:
challenge IoU (classes présentes dans la vérité terrain de la trame),
IoU moyennée sur les classes puis les trames, et IoU moyenne par classe.
Une classe absente à la fois de la prédiction et de la vérité terrain
d'une trame n'est pas définie pour cette trame et n'entre dans aucune moyenne.
"""

from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from surgtc.domain.entities.detection_entities import (
    BACKGROUND_ID,
    ClassVocabulary,
    FrameDetections,
)
from surgtc.domain.entities.metric_entities import MetricReport
from surgtc.domain.errors import NoDataError, ShapeError

LabelPair = Tuple[np.ndarray, np.ndarray]

logger = structlog.get_logger(__name__)


def _as_labels(pred: np.ndarray, gt: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    pred = np.asarray(pred)
    gt = np.asarray(gt)
    if pred.shape != gt.shape:
        raise ShapeError(
            f"prédiction {pred.shape} et vérité terrain {gt.shape} de formes différentes"
        )
    return pred.astype(np.int64, copy=False), gt.astype(np.int64, copy=False)


def frame_class_iou(pred: np.ndarray, gt: np.ndarray, class_id: int) -> Optional[float]:
    """
    IoU d'une classe dans une trame.

    Args:
        pred: Carte d'étiquettes prédite
        gt: Carte d'étiquettes de vérité terrain
        class_id: Classe évaluée

    Returns:
        L'IoU, ou None si la classe est absente des deux cartes
    """
    pred, gt = _as_labels(pred, gt)
    p = pred == class_id
    g = gt == class_id
    union = int(np.count_nonzero(p | g))
    if union == 0:
        return None
    return int(np.count_nonzero(p & g)) / union


def frame_class_table(
    pred: np.ndarray, gt: np.ndarray, class_ids: Optional[Iterable[int]] = None
) -> Dict[int, float]:
    """
    IoU de toutes les classes définies dans une trame, via une matrice de confusion.

    Args:
        pred: Carte d'étiquettes prédite
        gt: Carte d'étiquettes de vérité terrain
        class_ids: Classes à considérer (par défaut, toutes celles qui apparaissent)

    Returns:
        Classe -> IoU, classes non définies omises, par identifiant croissant
    """
    pred, gt = _as_labels(pred, gt)
    size = int(max(pred.max(initial=0), gt.max(initial=0))) + 1
    confusion = np.bincount(
        gt.ravel() * size + pred.ravel(), minlength=size * size
    ).reshape(size, size)
    intersection = np.diag(confusion)
    union = confusion.sum(axis=1) + confusion.sum(axis=0) - intersection

    if class_ids is None:
        wanted = [c for c in range(size) if c != BACKGROUND_ID]
    else:
        wanted = sorted(set(class_ids) - {BACKGROUND_ID})
    table: Dict[int, float] = {}
    for class_id in wanted:
        if class_id >= size or union[class_id] == 0:
            continue
        table[class_id] = int(intersection[class_id]) / int(union[class_id])
    return table


def _frame_scores(
    pairs: Sequence[LabelPair], class_ids: Optional[Iterable[int]], gt_present_only: bool
) -> List[float]:
    wanted = None if class_ids is None else set(class_ids)
    scores = []
    for pred, gt in pairs:
        table = frame_class_table(pred, gt, wanted)
        if gt_present_only:
            present = set(np.unique(gt).tolist()) - {BACKGROUND_ID}
            table = {c: v for c, v in table.items() if c in present}
        if table:
            scores.append(sum(table.values()) / len(table))
    if len(scores) < len(pairs):
        logger.warning(
            "Trames non évaluables ignorées",
            skipped=len(pairs) - len(scores),
            frames=len(pairs),
            gt_present_only=gt_present_only,
        )
    return scores


def eq1_iou(pairs: Sequence[LabelPair], class_ids: Optional[Iterable[int]] = None) -> float:
    """
    IoU moyennée sur les classes définies de chaque trame, puis sur les trames.

    Args:
        pairs: Couples (prédiction, vérité terrain)
        class_ids: Classes considérées (par défaut toutes)

    Returns:
        La moyenne sur les trames évaluables
    """
    scores = _frame_scores(pairs, class_ids, gt_present_only=False)
    if not scores:
        raise NoDataError("aucune trame évaluable")
    return sum(scores) / len(scores)


def challenge_iou(pairs: Sequence[LabelPair], class_ids: Optional[Iterable[int]] = None) -> float:
    """
    Comme eq1_iou, en ne gardant que les classes présentes dans la vérité
    terrain de chaque trame.

    Args:
        pairs: Couples (prédiction, vérité terrain)
        class_ids: Classes considérées (par défaut toutes)

    Returns:
        La moyenne sur les trames évaluables
    """
    scores = _frame_scores(pairs, class_ids, gt_present_only=True)
    if not scores:
        raise NoDataError("aucune trame avec des instruments dans la vérité terrain")
    return sum(scores) / len(scores)


def mean_class_iou(
    pairs: Sequence[LabelPair], class_ids: Optional[Iterable[int]] = None
) -> Tuple[Dict[int, float], float]:
    """
    IoU par classe moyennée sur les trames où elle est définie, puis moyenne
    sur les classes.

    Args:
        pairs: Couples (prédiction, vérité terrain)
        class_ids: Classes considérées (par défaut toutes)

    Returns:
        (IoU par classe définie, moyenne)
    """
    wanted = None if class_ids is None else set(class_ids)
    per_frame: Dict[int, List[float]] = {}
    for pred, gt in pairs:
        for class_id, value in frame_class_table(pred, gt, wanted).items():
            per_frame.setdefault(class_id, []).append(value)
    if not per_frame:
        raise NoDataError("aucune classe définie sur l'ensemble des trames")
    per_class = {c: sum(v) / len(v) for c, v in sorted(per_frame.items())}
    return per_class, sum(per_class.values()) / len(per_class)


def render_semantic(frame: FrameDetections) -> np.ndarray:
    """
    Carte d'étiquettes d'une trame à partir de ses candidats.

    Un pixel couvert par plusieurs candidats prend la classe du meilleur score,
    à score égal celle du premier candidat.

    Args:
        frame: Détections de la trame

    Returns:
        Grille uint8 (height, width), 0 pour le fond
    """
    labels = np.zeros((frame.height, frame.width), dtype=np.uint8)
    order = sorted(range(len(frame)), key=lambda i: (-frame.candidates[i].score, i))
    for index in reversed(order):
        candidate = frame.candidates[index]
        labels[candidate.mask.to_array()] = candidate.class_id
    return labels


def evaluate(pairs: Sequence[LabelPair], vocabulary: ClassVocabulary) -> MetricReport:
    """
    Calcule toutes les métriques d'une partition.

    Args:
        pairs: Couples (prédiction, vérité terrain)
        vocabulary: Vocabulaire des classes évaluées

    Returns:
        Le rapport; les classes jamais définies valent None
    """
    class_ids = vocabulary.class_ids
    per_class, mean = mean_class_iou(pairs, class_ids)
    return MetricReport(
        challenge_iou=challenge_iou(pairs, class_ids),
        eq1_iou=eq1_iou(pairs, class_ids),
        per_class_iou={c: per_class.get(c) for c in class_ids},
        mean_class_iou=mean,
        frames_evaluated=len(pairs),
    )
