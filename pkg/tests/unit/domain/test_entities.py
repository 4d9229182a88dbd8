"""
Tests des entités du domaine et de la hiérarchie d'erreurs.
"""

import numpy as np
import pytest
from pydantic import ValidationError

from surgtc.domain.entities.detection_entities import Candidate, ClassVocabulary, FrameDetections
from surgtc.domain.entities.mask_entities import BinaryMask, FlowField
from surgtc.domain.entities.temporal_entities import InstanceWindow, Predecessor, TemporalConfig
from surgtc.domain.errors import (
    DataError,
    FormatError,
    MissingInputError,
    ShapeError,
    SurgtcError,
    VocabularyError,
)


def test_error_context_is_not_overwritten():
    error = FormatError("en-tête invalide", frame=3)
    error.with_context(path="a/b.flo", frame=9)
    assert (error.path, error.frame) == ("a/b.flo", 3)
    assert str(error) == "a/b.flo: frame 3: en-tête invalide"
    assert error.status == "format_error"


def test_error_statuses_are_distinct():
    statuses = {cls.status for cls in (ShapeError, FormatError, DataError, VocabularyError, MissingInputError)}
    assert len(statuses) == 5
    assert issubclass(VocabularyError, DataError)
    assert str(SurgtcError("plain")) == "plain"


def test_mask_area_and_cached_pixels():
    mask = BinaryMask(3, 2, (1, 2, 1, 2))
    assert mask.area == 4
    pixels = mask.to_array()
    assert pixels is mask.to_array()
    assert not pixels.flags.writeable
    np.testing.assert_array_equal(pixels, [[False, False], [True, True], [True, True]])


def test_mask_equality_ignores_cache():
    a = BinaryMask(2, 2, (1, 3))
    b = BinaryMask(2, 2, [1, 3])
    a.to_array()
    assert a == b
    assert hash(a) == hash(b)


def test_mask_from_non_2d_grid():
    with pytest.raises(ShapeError):
        BinaryMask.from_array(np.zeros(4))


def test_flow_components_must_match():
    with pytest.raises(ShapeError):
        FlowField(u=np.zeros((2, 2)), v=np.zeros((2, 3)))


def test_flow_is_float32_and_read_only():
    flow = FlowField.constant(2, 3, 0.1, -1.0)
    assert flow.u.dtype == np.float32
    assert flow.shape == (2, 3)
    assert not flow.u.flags.writeable
    assert flow.equals(FlowField.constant(2, 3, 0.1, -1.0))
    assert not flow.equals(FlowField.zeros(2, 3))


@pytest.mark.parametrize("score", [-0.1, 1.5])
def test_candidate_score_range(score):
    with pytest.raises(DataError):
        Candidate(mask=BinaryMask(1, 1, (1,)), score=score, class_id=1)


def test_relabel_keeps_mask_and_score():
    candidate = Candidate(mask=BinaryMask(1, 2, (1, 1)), score=0.8, class_id=2, instance_id=4)
    relabelled = candidate.relabel(5)
    assert (relabelled.mask, relabelled.score, relabelled.instance_id) == (candidate.mask, 0.8, 4)
    assert relabelled.class_id == 5


def test_frame_rejects_foreign_mask_size():
    candidate = Candidate(mask=BinaryMask(2, 2, (4,)), score=0.9, class_id=1)
    with pytest.raises(ShapeError):
        FrameDetections(0, 3, 3, (candidate,))


def test_vocabulary_must_cover_one_to_k():
    with pytest.raises(VocabularyError):
        ClassVocabulary("gap", {1: "a", 3: "c"})
    with pytest.raises(VocabularyError):
        ClassVocabulary("dup", {1: "a", 2: "a"})


def test_vocabulary_is_sorted(vocabulary):
    sorted_vocabulary = ClassVocabulary("x", {2: "b", 1: "a"})
    assert sorted_vocabulary.class_ids == [1, 2]
    assert len(vocabulary) == 7
    assert 0 not in vocabulary
    with pytest.raises(VocabularyError):
        vocabulary.check(8)


def test_window_entries_oldest_first():
    current = Candidate(mask=BinaryMask(1, 1, (1,)), score=0.7, class_id=3)
    window = InstanceWindow(current, [Predecessor(0, 1, 0.5), Predecessor(1, 2, 0.6)])
    assert window.entries() == ((1, 0.5), (2, 0.6), (3, 0.7))


def test_temporal_config_bounds():
    with pytest.raises(ValidationError):
        TemporalConfig(window_f=-1)
    with pytest.raises(ValidationError):
        TemporalConfig(iou_threshold_u=1.5)
    with pytest.raises(ValidationError):
        TemporalConfig(assignment_strategy="median")
