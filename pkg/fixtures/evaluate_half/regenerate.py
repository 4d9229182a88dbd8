"""
Régénère la fixture evaluate_half.

Oracle: render_semantic + evaluate de la bibliothèque, puis le rapport JSON.
"""

import json
from pathlib import Path

import numpy as np

from surgtc.domain.entities.detection_entities import Candidate, FrameDetections
from surgtc.domain.entities.mask_entities import BinaryMask
from surgtc.domain.services.metric_service import evaluate, render_semantic
from surgtc.infrastructure.adapters.json_detection_adapter import write_detections
from surgtc.infrastructure.adapters.pgm_label_map_adapter import write_label_map
from surgtc.infrastructure.adapters.report_adapter import report_to_dict
from surgtc.infrastructure.adapters.vocabulary_adapter import load_vocabulary

HERE = Path(__file__).resolve().parent
SEQUENCE = "halves"


def main() -> None:
    vocabulary = load_vocabulary("endovis2017")
    mask = BinaryMask(2, 2, (0, 2, 2))
    frames = [
        FrameDetections(index, 2, 2, (Candidate(mask=mask, score=0.9, class_id=1),))
        for index in range(2)
    ]
    truth = [
        np.array([[1, 0], [1, 0]], dtype=np.uint8),
        np.array([[2, 0], [2, 0]], dtype=np.uint8),
    ]

    write_detections(SEQUENCE, frames, HERE / "input" / "detections" / f"{SEQUENCE}.json")
    for frame, grid in zip(frames, truth):
        name = f"{frame.frame_index:06d}.pgm"
        write_label_map(grid, HERE / "input" / "groundtruth" / SEQUENCE / name)

    report = evaluate([(render_semantic(f), g) for f, g in zip(frames, truth)], vocabulary)
    payload = json.dumps(report_to_dict(report, vocabulary), indent=2) + "\n"
    (HERE / "expected" / "report.json").write_bytes(payload.encode("utf-8"))


if __name__ == "__main__":
    main()
