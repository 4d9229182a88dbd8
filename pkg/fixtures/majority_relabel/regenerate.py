"""
Régénère les entrées et la sortie attendue de la fixture majority_relabel.

Oracle: correct_sequence de la bibliothèque, appelé directement.
"""

from pathlib import Path

from surgtc.domain.entities.detection_entities import Candidate, FrameDetections
from surgtc.domain.entities.mask_entities import BinaryMask, FlowField
from surgtc.domain.entities.temporal_entities import AssignmentStrategy, TemporalConfig
from surgtc.domain.services.temporal_service import correct_sequence
from surgtc.infrastructure.adapters.flo_flow_adapter import write_flo
from surgtc.infrastructure.adapters.json_detection_adapter import write_detections

HERE = Path(__file__).resolve().parent
SEQUENCE = "tiny"
CLASSES = [1, 1, 2, 1]


def main() -> None:
    mask = BinaryMask(2, 2, (0, 2, 2))
    frames = [
        FrameDetections(index, 2, 2, (Candidate(mask=mask, score=0.9, class_id=class_id),))
        for index, class_id in enumerate(CLASSES)
    ]
    flows = [FlowField.zeros(2, 2) for _ in CLASSES[1:]]
    config = TemporalConfig(
        window_f=2, iou_threshold_u=0.0, assignment_strategy=AssignmentStrategy.WEIGHTED_MODE
    )

    write_detections(SEQUENCE, frames, HERE / "input" / "detections" / f"{SEQUENCE}.json")
    for frame, flow in zip(frames[1:], flows):
        write_flo(flow, HERE / "input" / "flows" / SEQUENCE / f"{frame.frame_index:06d}.flo")
    corrected = correct_sequence(frames, flows, config)
    write_detections(SEQUENCE, corrected, HERE / "expected" / f"{SEQUENCE}.json")


if __name__ == "__main__":
    main()
