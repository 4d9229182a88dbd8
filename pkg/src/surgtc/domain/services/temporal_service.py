"""
Module contenant le service de cohérence temporelle.

Deux étapes répétées pour chaque trame t d'une séquence:
l'appariement (déformation des candidats des f trames précédentes vers t,
puis appariements réciproques par IoU) et la réaffectation de classe
(mode pondéré par les scores, ou score maximal).
"""

from collections import deque
from decimal import Decimal
from typing import Deque, Dict, List, Sequence, Tuple

import numpy as np
import structlog

from surgtc.domain.entities.detection_entities import FrameDetections
from surgtc.domain.entities.mask_entities import BinaryMask, FlowField
from surgtc.domain.entities.temporal_entities import (
    AssignmentStrategy,
    InstanceWindow,
    Predecessor,
    TemporalConfig,
)
from surgtc.domain.errors import ContractError
from surgtc.domain.services.mask_ops import compose_warp, iou_matrix, warp

logger = structlog.get_logger(__name__)


def _check_consecutive(frames: Sequence[FrameDetections], what: str) -> None:
    for before, after in zip(frames, frames[1:]):
        if after.frame_index != before.frame_index + 1:
            raise ContractError(
                f"{what}: trames non consécutives ({before.frame_index} puis {after.frame_index})",
                frame=after.frame_index,
            )


def mutual_best_pairs(ious: np.ndarray, threshold: float) -> List[Tuple[int, int]]:
    """
    Appariements réciproques dans une matrice d'IoU.

    (c, p) est retenu si p est le meilleur partenaire de c, c le meilleur
    partenaire de p, et si leur IoU dépasse strictement le seuil. À IoU égale,
    l'indice le plus petit l'emporte.

    Args:
        ious: Matrice (candidats courants, candidats précédents)
        threshold: Seuil U

    Returns:
        Couples (indice courant, indice précédent), par indice courant croissant
    """
    if ious.size == 0:
        return []
    best_previous = np.argmax(ious, axis=1)
    best_current = np.argmax(ious, axis=0)
    return [
        (c, int(p))
        for c, p in enumerate(best_previous)
        if best_current[p] == c and ious[c, p] > threshold
    ]


def _build_windows(
    current: FrameDetections,
    previous: Sequence[FrameDetections],
    warped: Sequence[Sequence[BinaryMask]],
    threshold: float,
) -> List[InstanceWindow]:
    current_masks = [c.mask for c in current]
    matched: List[List[Predecessor]] = [[] for _ in current_masks]
    for frame, masks in zip(previous, warped):
        for c, p in mutual_best_pairs(iou_matrix(current_masks, masks), threshold):
            candidate = frame.candidates[p]
            matched[c].append(Predecessor(frame.frame_index, candidate.class_id, candidate.score))
    return [
        InstanceWindow(current=candidate, matched_predecessors=tuple(preds))
        for candidate, preds in zip(current.candidates, matched)
    ]


def match_window(
    current: FrameDetections,
    previous: Sequence[FrameDetections],
    flows: Sequence[FlowField],
    config: TemporalConfig,
) -> List[InstanceWindow]:
    """
    Étape d'appariement pour une trame.

    Args:
        current: Détections de la trame t
        previous: Au plus f trames précédant immédiatement t, indices croissants
        flows: flows[j] fait avancer les candidats de la trame t-j-1 d'un pas vers t
        config: Paramètres (f, U)

    Returns:
        Une fenêtre par candidat courant, dans l'ordre des candidats
    """
    if len(previous) > config.window_f:
        raise ContractError(
            f"{len(previous)} trames précédentes pour une fenêtre de {config.window_f}",
            frame=current.frame_index,
        )
    if len(flows) < len(previous):
        raise ContractError(
            f"{len(flows)} flux pour {len(previous)} trames précédentes",
            frame=current.frame_index,
        )
    if previous:
        _check_consecutive(list(previous) + [current], "match_window")

    warped = []
    for position, frame in enumerate(previous):
        steps = len(previous) - position
        # plus ancien pas d'abord: flows[steps-1], ..., flows[0]
        chain = [flows[j] for j in reversed(range(steps))]
        warped.append([compose_warp(c.mask, chain) for c in frame])
    return _build_windows(current, previous, warped, config.iou_threshold_u)


def _break_tie(tied: set, entries: Sequence[Tuple[int, float]]) -> int:
    # entrée la plus récente d'abord, puis plus petit identifiant
    last_position: Dict[int, int] = {}
    for position, (class_id, _) in enumerate(entries):
        last_position[class_id] = position
    return max(tied, key=lambda class_id: (last_position[class_id], -class_id))


def assign_class(window: InstanceWindow, strategy: AssignmentStrategy) -> int:
    """
    Étape de réaffectation de classe pour une fenêtre.

    Args:
        window: Fenêtre (prédécesseurs + candidat courant)
        strategy: weighted_mode (somme des scores par classe) ou max
            (classe de l'entrée au meilleur score)

    Returns:
        La classe retenue
    """
    entries = window.entries()
    strategy = AssignmentStrategy(strategy)
    if strategy is AssignmentStrategy.WEIGHTED_MODE:
        totals: Dict[int, Decimal] = {}
        for class_id, score in entries:
            totals[class_id] = totals.get(class_id, Decimal(0)) + Decimal(repr(score))
        best = max(totals.values())
        tied = {class_id for class_id, total in totals.items() if total == best}
    else:
        best_score = max(score for _, score in entries)
        tied = {class_id for class_id, score in entries if score == best_score}
    if len(tied) == 1:
        return next(iter(tied))
    return _break_tie(tied, entries)


def correct_sequence(
    frames: Sequence[FrameDetections],
    flows: Sequence[FlowField],
    config: TemporalConfig,
) -> List[FrameDetections]:
    """
    Passe causale sur toute une séquence.

    À la trame t, la fenêtre utilise les min(f, t) trames précédentes avec
    leurs étiquettes déjà corrigées. Seules les classes changent.

    Args:
        frames: Détections par trame, indices consécutifs
        flows: flows[k] est le flux arrière de la trame k+1 vers la trame k (peut être vide si f=0)
        config: Paramètres du module

    Returns:
        Les détections corrigées
    """
    _check_consecutive(frames, "correct_sequence")
    # f=0: aucun flux n'est lu, la liste peut être vide
    if config.window_f == 0 and not flows:
        return list(frames)
    if len(flows) != max(len(frames) - 1, 0):
        raise ContractError(f"{len(flows)} flux pour {len(frames)} trames")
    if config.window_f == 0:
        return list(frames)

    corrected: List[FrameDetections] = []
    # (trame corrigée, masques ramenés dans la trame précédant la trame courante)
    cache: Deque[Tuple[FrameDetections, List[BinaryMask]]] = deque()
    relabelled = 0
    for k, frame in enumerate(frames):
        if k > 0:
            flow = flows[k - 1]
            if len(cache) == config.window_f:
                cache.popleft()
            cache = deque(
                (previous, [warp(mask, flow) for mask in masks]) for previous, masks in cache
            )
            last = corrected[k - 1]
            cache.append((last, [warp(c.mask, flow) for c in last]))

        windows = _build_windows(
            frame,
            [previous for previous, _ in cache],
            [masks for _, masks in cache],
            config.iou_threshold_u,
        )
        candidates = []
        for window in windows:
            class_id = assign_class(window, config.assignment_strategy)
            if class_id != window.current.class_id:
                relabelled += 1
                logger.debug(
                    "Classe corrigée",
                    frame=frame.frame_index,
                    before=window.current.class_id,
                    after=class_id,
                    predecessors=len(window.matched_predecessors),
                )
            candidates.append(window.current.relabel(class_id))
        corrected.append(frame.with_candidates(candidates))

    logger.debug("Séquence corrigée", frames=len(frames), relabelled=relabelled)
    return corrected
