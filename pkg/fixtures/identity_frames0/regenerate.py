"""
Régénère la fixture identity_frames0: avec f=0 la sortie est l'entrée canonique.
"""

from pathlib import Path

from surgtc.domain.entities.detection_entities import Candidate, FrameDetections
from surgtc.domain.entities.mask_entities import BinaryMask
from surgtc.domain.entities.temporal_entities import TemporalConfig
from surgtc.domain.services.temporal_service import correct_sequence
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
    write_detections(SEQUENCE, frames, HERE / "input" / "detections" / f"{SEQUENCE}.json")
    identity = correct_sequence(frames, [], TemporalConfig(window_f=0))
    write_detections(SEQUENCE, identity, HERE / "expected" / f"{SEQUENCE}.json")


if __name__ == "__main__":
    main()
