"""
Tests du module de cohérence temporelle: appariement, réaffectation, passe complète.
"""

import itertools

import numpy as np
import pytest

from conftest import box_mask, frame_of, mask_of, static_sequence
from surgtc.domain.entities.detection_entities import Candidate, FrameDetections
from surgtc.domain.entities.mask_entities import BinaryMask, FlowField
from surgtc.domain.entities.temporal_entities import (
    AssignmentStrategy,
    InstanceWindow,
    Predecessor,
    TemporalConfig,
)
from surgtc.domain.errors import ConfigError, ContractError
from surgtc.domain.services.temporal_service import (
    assign_class,
    correct_sequence,
    match_window,
    mutual_best_pairs,
)

WEIGHTED = AssignmentStrategy.WEIGHTED_MODE
MAX = AssignmentStrategy.MAX
DOT = BinaryMask(1, 1, (0, 1))


def window(classes, scores):
    """Fenêtre dont la dernière entrée est le candidat courant."""
    predecessors = tuple(
        Predecessor(frame_index=i, class_id=c, score=s)
        for i, (c, s) in enumerate(zip(classes[:-1], scores[:-1]))
    )
    current = Candidate(mask=DOT, score=scores[-1], class_id=classes[-1])
    return InstanceWindow(current=current, matched_predecessors=predecessors)


class TestConfig:
    def test_defaults(self):
        config = TemporalConfig()
        assert (config.window_f, config.iou_threshold_u) == (6, 0.0)
        assert config.assignment_strategy == WEIGHTED

    def test_profiles(self):
        assert TemporalConfig.for_profile("endovis2017").iou_threshold_u == 0.0
        assert TemporalConfig.for_profile("endovis2018").iou_threshold_u == 0.5
        assert TemporalConfig.for_profile("endovis2018", iou_threshold_u=0.2).iou_threshold_u == 0.2

    def test_unknown_profile(self):
        with pytest.raises(ConfigError):
            TemporalConfig.for_profile("cholec80")


class TestAssignClass:
    def test_weighted_mode_sums_scores(self):
        assert assign_class(window([2, 3, 2], [0.8, 0.95, 0.9]), WEIGHTED) == 2

    def test_max_takes_best_single_score(self):
        assert assign_class(window([2, 3, 2], [0.8, 0.95, 0.9]), MAX) == 3

    @pytest.mark.parametrize("strategy", [WEIGHTED, MAX])
    def test_singleton_keeps_its_class(self, strategy):
        assert assign_class(window([5], [0.8]), strategy) == 5

    def test_decimal_ties_are_exact(self):
        """0.1 + 0.2 et 0.3 sont à égalité; l'entrée la plus récente départage."""
        assert assign_class(window([1, 1, 2], [0.1, 0.2, 0.3]), WEIGHTED) == 2
        assert assign_class(window([2, 1, 1], [0.3, 0.1, 0.2]), WEIGHTED) == 1

    def test_never_invents_a_class(self, rng):
        for _ in range(500):
            size = int(rng.integers(1, 6))
            classes = [int(c) for c in rng.integers(1, 8, size=size)]
            scores = [float(s) for s in rng.random(size)]
            for strategy in (WEIGHTED, MAX):
                assert assign_class(window(classes, scores), strategy) in classes

    @staticmethod
    def _oracle(classes, ticks, strategy):
        """Argmax exact en entiers (scores = ticks / 20), puis récence, puis plus petit id."""
        if strategy is WEIGHTED:
            weight = {}
            for c, t in zip(classes, ticks):
                weight[c] = weight.get(c, 0) + t
        else:
            weight = {}
            for c, t in zip(classes, ticks):
                weight[c] = max(weight.get(c, 0), t)
        best = max(weight.values())
        tied = [c for c in weight if weight[c] == best]
        last = {c: i for i, c in enumerate(classes)}
        return max(tied, key=lambda c: (last[c], -c))

    def test_against_integer_oracle(self, rng):
        """
        Toutes les fenêtres de 1 à 3 entrées sur 3 classes et la grille de
        scores au pas de 0.05. Les fenêtres de 4 et 5 entrées ne sont
        qu'échantillonnées: 60 tirages de scores par suite de classes.
        """
        grid = list(range(1, 21))
        windows = []
        for size in (1, 2, 3):
            for classes in itertools.product((1, 2, 3), repeat=size):
                for ticks in itertools.product(grid, repeat=size):
                    windows.append((classes, ticks))
        for size in (4, 5):
            for classes in itertools.product((1, 2, 3), repeat=size):
                for _ in range(60):
                    windows.append((classes, tuple(int(t) for t in rng.integers(1, 21, size=size))))

        for classes, ticks in windows:
            scores = [round(t * 0.05, 2) for t in ticks]
            built = window(list(classes), scores)
            for strategy in (WEIGHTED, MAX):
                assert assign_class(built, strategy) == self._oracle(classes, ticks, strategy)


class TestMutualBest:
    def test_reciprocal_only(self):
        ious = np.array([[0.6, 0.5], [0.7, 0.1]])
        # colonne 0: meilleur courant = 1; ligne 0: meilleur précédent = 0 -> non réciproque
        assert mutual_best_pairs(ious, 0.0) == [(1, 0)]

    def test_threshold_is_strict(self):
        assert mutual_best_pairs(np.array([[0.5]]), 0.5) == []
        assert mutual_best_pairs(np.array([[0.51]]), 0.5) == [(0, 0)]

    def test_zero_overlap_never_matches_at_zero_threshold(self):
        assert mutual_best_pairs(np.zeros((2, 2)), 0.0) == []

    def test_no_previous_candidate_used_twice(self, rng):
        for _ in range(200):
            ious = rng.random((4, 5)) * (rng.random((4, 5)) < 0.6)
            pairs = mutual_best_pairs(ious, 0.0)
            previous = [p for _, p in pairs]
            assert len(previous) == len(set(previous))


class TestMatchWindow:
    def test_translating_object_matches_both_predecessors(self):
        height, width = 4, 8
        frames = [
            frame_of(t, height, width, [(box_mask(height, width, 1, 1 + t, (2, 2)), 0.9, 1)])
            for t in range(3)
        ]
        step = FlowField.constant(height, width, -1.0, 0.0)
        config = TemporalConfig(window_f=2, iou_threshold_u=0.0)
        windows = match_window(frames[2], frames[:2], [step, step], config)
        assert len(windows) == 1
        assert [p.frame_index for p in windows[0].matched_predecessors] == [0, 1]

    def test_no_previous_frames(self):
        frame = frame_of(0, 3, 3, [(mask_of([(0, 0)], 3, 3), 0.9, 1), (mask_of([(2, 2)], 3, 3), 0.8, 2)])
        windows = match_window(frame, [], [], TemporalConfig())
        assert [w.matched_predecessors for w in windows] == [(), ()]

    def test_disjoint_objects_match_only_themselves(self):
        left = box_mask(4, 8, 0, 0, (4, 3))
        right = box_mask(4, 8, 0, 5, (4, 3))
        previous = frame_of(0, 4, 8, [(right, 0.9, 2), (left, 0.9, 1)])
        current = frame_of(1, 4, 8, [(left, 0.9, 3), (right, 0.9, 4)])
        config = TemporalConfig(window_f=1, iou_threshold_u=0.5)
        windows = match_window(current, [previous], [FlowField.zeros(4, 8)], config)
        assert [w.matched_predecessors[0].class_id for w in windows] == [1, 2]

    def test_too_many_previous_frames(self):
        frames, flows = static_sequence([1, 1, 1])
        with pytest.raises(ContractError):
            match_window(frames[2], frames[:2], flows, TemporalConfig(window_f=1))

    def test_missing_flows(self):
        frames, flows = static_sequence([1, 1, 1])
        with pytest.raises(ContractError):
            match_window(frames[2], frames[:2], flows[:1], TemporalConfig(window_f=2))

    def test_non_contiguous_previous_frames(self):
        frames, flows = static_sequence([1, 1, 1, 1])
        with pytest.raises(ContractError):
            match_window(frames[3], [frames[0], frames[2]], flows[:2], TemporalConfig(window_f=2))


class TestCorrectSequence:
    def test_zero_window_is_identity(self):
        frames, flows = static_sequence([1, 2, 1, 3])
        assert correct_sequence(frames, flows, TemporalConfig(window_f=0)) == frames
        assert correct_sequence(frames, [], TemporalConfig(window_f=0)) == frames

    def test_single_flip_is_outvoted(self):
        frames, flows = static_sequence([1, 1, 1, 2, 1, 1, 1])
        corrected = correct_sequence(frames, flows, TemporalConfig(window_f=6))
        assert [f.candidates[0].class_id for f in corrected] == [1] * 7

    def test_single_frame_unchanged(self):
        frames, _ = static_sequence([4])
        assert correct_sequence(frames, [], TemporalConfig()) == frames

    def test_flow_count_mismatch(self):
        frames, flows = static_sequence([1, 1, 1])
        with pytest.raises(ContractError):
            correct_sequence(frames, flows[:1], TemporalConfig())

    def test_non_consecutive_frames(self):
        frames, flows = static_sequence([1, 1])
        shifted = [frames[0], FrameDetections(5, 6, 6, frames[1].candidates)]
        with pytest.raises(ContractError):
            correct_sequence(shifted, flows, TemporalConfig())

    def test_masks_scores_and_counts_preserved(self, rng):
        height, width = 8, 8
        frames = []
        for t in range(8):
            candidates = [
                (BinaryMask.from_array(rng.random((height, width)) < 0.3), float(rng.random()), int(c))
                for c in rng.integers(1, 4, size=int(rng.integers(0, 4)))
            ]
            frames.append(frame_of(t, height, width, candidates))
        flows = [FlowField(u=rng.normal(size=(8, 8)), v=rng.normal(size=(8, 8))) for _ in range(7)]
        corrected = correct_sequence(frames, flows, TemporalConfig(window_f=3))
        assert len(corrected) == len(frames)
        for before, after in zip(frames, corrected):
            assert len(before) == len(after)
            for a, b in zip(before, after):
                assert (a.mask, a.score) == (b.mask, b.score)

    def test_unanimous_sequence_is_fixed_point(self):
        frames, flows = static_sequence([3] * 6)
        assert correct_sequence(frames, flows, TemporalConfig(window_f=4)) == frames

    def test_uses_corrected_labels(self):
        """La trame 2 voit la trame 1 déjà corrigée (1), pas sa prédiction brute (2)."""
        frames, flows = static_sequence([1, 1, 2, 2, 2])
        corrected = correct_sequence(frames, flows, TemporalConfig(window_f=3))
        # t=2: {1, 1, 2} -> 1; t=3: {1, 1, 1, 2} -> 1; t=4: {1, 1, 1, 2} -> 1
        assert [f.candidates[0].class_id for f in corrected] == [1, 1, 1, 1, 1]

    def test_incremental_warps_match_direct_composition(self, rng):
        """La passe complète donne les mêmes fenêtres qu'un appel direct à match_window."""
        height, width = 10, 12
        frames = []
        for t in range(6):
            mask = box_mask(height, width, 2, 1 + t, (4, 3))
            frames.append(frame_of(t, height, width, [(mask, 0.9, int(rng.integers(1, 3)))]))
        flows = [FlowField.constant(height, width, -1.0, 0.0) for _ in range(5)]
        config = TemporalConfig(window_f=3)
        corrected = correct_sequence(frames, flows, config)
        for t in range(1, 6):
            previous = corrected[max(0, t - 3):t]
            steps = [flows[t - 1 - j] for j in range(len(previous))]
            windows = match_window(frames[t], previous, steps, config)
            assert corrected[t].candidates[0].class_id == assign_class(windows[0], config.assignment_strategy)
