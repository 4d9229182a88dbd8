"""
Constructeurs partagés par les tests de surgtc.
"""

from pathlib import Path
from typing import Iterable, List, Sequence, Tuple

import numpy as np
import pytest
import structlog

from surgtc.domain.entities.detection_entities import Candidate, FrameDetections
from surgtc.domain.entities.mask_entities import BinaryMask, FlowField
from surgtc.infrastructure.adapters.vocabulary_adapter import load_vocabulary

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES_ROOT = REPO_ROOT / "fixtures"


def mask_of(pixels: Iterable[Tuple[int, int]], height: int, width: int) -> BinaryMask:
    """Masque à partir d'une liste de pixels (ligne, colonne)."""
    grid = np.zeros((height, width), dtype=bool)
    for row, col in pixels:
        grid[row, col] = True
    return BinaryMask.from_array(grid)


def box_mask(height: int, width: int, top: int, left: int, size: Tuple[int, int]) -> BinaryMask:
    grid = np.zeros((height, width), dtype=bool)
    grid[top:top + size[0], left:left + size[1]] = True
    return BinaryMask.from_array(grid)


def frame_of(
    index: int, height: int, width: int, candidates: Sequence[Tuple[BinaryMask, float, int]]
) -> FrameDetections:
    """Trame à partir de triplets (masque, score, classe)."""
    return FrameDetections(
        index,
        height,
        width,
        tuple(Candidate(mask=m, score=s, class_id=c) for m, s, c in candidates),
    )


def static_sequence(
    classes: Sequence[int], score: float = 0.9, height: int = 6, width: int = 6
) -> Tuple[List[FrameDetections], List[FlowField]]:
    """Un objet immobile dont la classe prédite suit `classes`, flux nuls."""
    mask = box_mask(height, width, 1, 1, (3, 3))
    frames = [frame_of(t, height, width, [(mask, score, c)]) for t, c in enumerate(classes)]
    flows = [FlowField.zeros(height, width) for _ in classes[1:]]
    return frames, flows


@pytest.fixture
def vocabulary():
    return load_vocabulary("endovis2017")


@pytest.fixture
def rng():
    return np.random.default_rng(20200917)


@pytest.fixture(autouse=True)
def _reset_structlog():
    """Les invocations CLI configurent structlog sur un flux capturé ; on repart à zéro."""
    yield
    structlog.reset_defaults()
