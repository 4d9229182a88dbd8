"""
Module contenant les opérations pures sur les masques binaires.

Encodage RLE, IoU et déformation arrière par flux optique. Toutes les
fonctions sont sans état et peuvent être appelées depuis plusieurs threads.
"""

from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage

from surgtc.domain.entities.mask_entities import BinaryMask, FlowField
from surgtc.domain.errors import ShapeError

# Seuil de binarisation après interpolation bilinéaire
WARP_THRESHOLD = 0.5


def rle_encode(pixels: np.ndarray) -> BinaryMask:
    """
    Encode une grille binaire dense en RLE colonne par colonne.

    Args:
        pixels: Grille 2D

    Returns:
        Le masque encodé, premier run de fond éventuellement nul
    """
    return BinaryMask.from_array(pixels)


def rle_decode(mask: BinaryMask) -> np.ndarray:
    """
    Décode un masque en grille booléenne.

    Args:
        mask: Masque encodé

    Returns:
        Copie modifiable de forme (height, width)
    """
    return mask.to_array().copy()


def _check_same_shape(a_shape, b_shape, what: str) -> None:
    if tuple(a_shape) != tuple(b_shape):
        raise ShapeError(f"{what}: dimensions {tuple(a_shape)} et {tuple(b_shape)} différentes")


def iou(a: BinaryMask, b: BinaryMask) -> float:
    """
    Intersection sur union de deux masques.

    Args:
        a: Premier masque
        b: Second masque

    Returns:
        |a∩b| / |a∪b|, ou 0 si l'union est vide
    """
    _check_same_shape(a.shape, b.shape, "iou")
    pa = a.to_array()
    pb = b.to_array()
    union = int(np.count_nonzero(pa | pb))
    if union == 0:
        return 0.0
    return int(np.count_nonzero(pa & pb)) / union


def iou_matrix(a_masks: Sequence[BinaryMask], b_masks: Sequence[BinaryMask]) -> np.ndarray:
    """
    IoU de toutes les paires (a_i, b_j).

    Args:
        a_masks: n masques
        b_masks: m masques de mêmes dimensions

    Returns:
        Tableau (n, m); chaque élément est égal à iou(a_i, b_j)
    """
    if not a_masks or not b_masks:
        return np.zeros((len(a_masks), len(b_masks)), dtype=np.float64)
    shape = a_masks[0].shape
    for mask in list(a_masks) + list(b_masks):
        _check_same_shape(shape, mask.shape, "iou_matrix")
    a = np.stack([m.to_array().ravel() for m in a_masks]).astype(np.float64)
    b = np.stack([m.to_array().ravel() for m in b_masks]).astype(np.float64)
    intersection = a @ b.T
    union = a.sum(axis=1)[:, None] + b.sum(axis=1)[None, :] - intersection
    result = np.zeros_like(intersection)
    np.divide(intersection, union, out=result, where=union > 0)
    return result


def warp(mask: BinaryMask, flow: FlowField) -> BinaryMask:
    """
    Déformation arrière d'un masque par un flux.

    Le pixel p de sortie échantillonne le masque d'entrée en p + (u(p), v(p))
    par interpolation bilinéaire; les échantillons hors image valent 0.

    Args:
        mask: Masque de la trame précédente
        flow: Flux arrière de la trame courante vers la précédente

    Returns:
        Le masque ramené dans la trame courante
    """
    _check_same_shape(mask.shape, flow.shape, "warp")
    if mask.area == 0:
        return mask
    rows, cols = np.indices(mask.shape, dtype=np.float64)
    coordinates = np.stack([rows + flow.v, cols + flow.u])
    sampled = ndimage.map_coordinates(
        mask.to_array().astype(np.float64),
        coordinates,
        order=1,
        mode="grid-constant",
        cval=0.0,
        prefilter=False,
    )
    return BinaryMask.from_array(sampled >= WARP_THRESHOLD)


def compose_warp(mask: BinaryMask, flows: Iterable[FlowField]) -> BinaryMask:
    """
    Applique successivement warp pour chaque flux, du plus ancien au plus récent.

    Args:
        mask: Masque à déplacer
        flows: Flux ordonnés

    Returns:
        Le masque déformé pas à pas
    """
    for flow in flows:
        mask = warp(mask, flow)
    return mask
