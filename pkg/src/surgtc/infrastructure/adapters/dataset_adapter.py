"""
Module contenant l'adaptateur de l'arborescence d'un jeu de données.

    <detections>/<séquence>.json
    <flows>/<séquence>/<index:06d>.flo      flux de la trame index vers index-1
    <groundtruth>/<séquence>/<index:06d>.pgm
    <instances>/<séquence>.json             vérité terrain par instances
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Tuple

import numpy as np
import structlog

from surgtc.domain.entities.detection_entities import (
    ClassVocabulary,
    FrameDetections,
    SequenceBundle,
    SequenceDetections,
)
from surgtc.domain.entities.mask_entities import FlowField
from surgtc.domain.errors import MissingInputError
from surgtc.domain.ports.storage_ports import (
    DetectionStorePort,
    FlowStorePort,
    LabelMapStorePort,
)
from surgtc.infrastructure.adapters.flo_flow_adapter import FloFlowAdapter
from surgtc.infrastructure.adapters.json_detection_adapter import (
    DEFAULT_SCORE_THRESHOLD,
    JsonDetectionAdapter,
)
from surgtc.infrastructure.adapters.pgm_label_map_adapter import PgmLabelMapAdapter

logger = structlog.get_logger(__name__)

DETECTIONS_DIR = "detections"
FLOWS_DIR = "flows"
GROUNDTRUTH_DIR = "groundtruth"
INSTANCES_DIR = "instances"


def frame_file(index: int, suffix: str) -> str:
    return f"{index:06d}{suffix}"


@dataclass(frozen=True)
class DatasetLayout:
    """
    Emplacements des fichiers d'un jeu de données.

    Attributes:
        detections: Dossier des fichiers de détections
        flows: Dossier des flux (optionnel)
        groundtruth: Dossier des cartes d'étiquettes (optionnel)
        instances: Dossier de la vérité terrain par instances (optionnel)
    """
    detections: Path
    flows: Optional[Path] = None
    groundtruth: Optional[Path] = None
    instances: Optional[Path] = None

    @classmethod
    def under(cls, root: Path) -> "DatasetLayout":
        """Arborescence complète sous un même dossier (sortie du simulateur)."""
        return cls(
            detections=root / DETECTIONS_DIR,
            flows=root / FLOWS_DIR,
            groundtruth=root / GROUNDTRUTH_DIR,
            instances=root / INSTANCES_DIR,
        )

    def detection_file(self, sequence: str) -> Path:
        return self.detections / f"{sequence}.json"

    def flow_file(self, sequence: str, index: int) -> Path:
        return self._require(self.flows, "flux") / sequence / frame_file(index, ".flo")

    def label_map_file(self, sequence: str, index: int) -> Path:
        folder = self._require(self.groundtruth, "vérité terrain")
        return folder / sequence / frame_file(index, ".pgm")

    def instance_file(self, sequence: str) -> Path:
        return self._require(self.instances, "instances") / f"{sequence}.json"

    @staticmethod
    def _require(folder: Optional[Path], what: str) -> Path:
        if folder is None:
            raise MissingInputError(f"dossier de {what} non fourni")
        return folder

    def sequences(self, only: Optional[Iterable[str]] = None) -> List[str]:
        """
        Séquences présentes dans le dossier des détections, par nom croissant.

        Args:
            only: Filtre optionnel; un nom absent du dossier est une erreur

        Returns:
            Les noms de séquence
        """
        if not self.detections.is_dir():
            raise MissingInputError("dossier de détections introuvable", path=self.detections)
        found = sorted(path.stem for path in self.detections.glob("*.json"))
        if only is None:
            return found
        wanted = sorted(set(only))
        for name in wanted:
            if name not in found:
                raise MissingInputError(
                    "séquence demandée absente", path=self.detection_file(name)
                )
        return wanted


class DatasetAdapter:
    """
    Charge et écrit des séquences complètes selon une arborescence.
    """

    def __init__(
        self,
        layout: DatasetLayout,
        detection_store: Optional[DetectionStorePort] = None,
        flow_store: Optional[FlowStorePort] = None,
        label_store: Optional[LabelMapStorePort] = None,
    ):
        self.layout = layout
        self.detection_store = detection_store or JsonDetectionAdapter()
        self.flow_store = flow_store or FloFlowAdapter()
        self.label_store = label_store or PgmLabelMapAdapter()

    def load_detections(
        self,
        sequence: str,
        vocabulary: ClassVocabulary,
        score_threshold: float = DEFAULT_SCORE_THRESHOLD,
    ) -> SequenceDetections:
        return self.detection_store.read(
            self.layout.detection_file(sequence), vocabulary, score_threshold
        )

    def load_flows(self, sequence: str, frames: List[FrameDetections]) -> List[FlowField]:
        """Flux arrière de chaque trame sauf la première, dans l'ordre des trames."""
        paths = [self.layout.flow_file(sequence, frame.frame_index) for frame in frames[1:]]
        for path in paths:
            if not path.is_file():
                raise MissingInputError("fichier de flux introuvable", path=path)
        return [self.flow_store.read(path) for path in paths]

    def load_groundtruth(
        self, sequence: str, frames: List[FrameDetections], vocabulary: ClassVocabulary
    ) -> List[np.ndarray]:
        paths = [self.layout.label_map_file(sequence, frame.frame_index) for frame in frames]
        for path in paths:
            if not path.is_file():
                raise MissingInputError("carte d'étiquettes introuvable", path=path)
        return [self.label_store.read(path, vocabulary) for path in paths]

    def load_bundle(
        self,
        sequence: str,
        vocabulary: ClassVocabulary,
        score_threshold: float = DEFAULT_SCORE_THRESHOLD,
        with_flows: bool = True,
        with_groundtruth: bool = True,
    ) -> SequenceBundle:
        """
        Charge une séquence et les fichiers qui l'accompagnent.

        Toutes les lectures ont lieu avant tout calcul: un fichier manquant
        est signalé avant qu'une sortie soit produite.

        Args:
            sequence: Nom de la séquence
            vocabulary: Vocabulaire des classes
            score_threshold: Seuil strict des candidats
            with_flows: Charger les flux
            with_groundtruth: Charger les cartes d'étiquettes

        Returns:
            La séquence
        """
        detections = self.load_detections(sequence, vocabulary, score_threshold)
        frames = detections.frames
        flows = self.load_flows(sequence, frames) if with_flows else []
        groundtruth = (
            self.load_groundtruth(sequence, frames, vocabulary) if with_groundtruth else []
        )
        logger.info(
            "Séquence chargée",
            sequence=sequence,
            frames=len(frames),
            candidates=sum(len(frame) for frame in frames),
        )
        return SequenceBundle(
            name=sequence,
            frames=frames,
            flows=flows,
            groundtruth=groundtruth,
            frame_size=detections.frame_size,
        )

    def write_frames(
        self,
        sequence: str,
        frames: List[FrameDetections],
        frame_size: Optional[Tuple[int, int]] = None,
    ) -> Path:
        path = self.layout.detection_file(sequence)
        self.detection_store.write(sequence, frames, path, frame_size)
        return path

    def write_instances(self, sequence: str, frames: List[FrameDetections]) -> Path:
        path = self.layout.instance_file(sequence)
        self.detection_store.write(sequence, frames, path)
        return path

    def write_flows(
        self, sequence: str, frames: List[FrameDetections], flows: List[FlowField]
    ) -> None:
        for frame, flow in zip(frames[1:], flows):
            self.flow_store.write(flow, self.layout.flow_file(sequence, frame.frame_index))

    def write_groundtruth(
        self, sequence: str, frames: List[FrameDetections], label_maps: List[np.ndarray]
    ) -> None:
        for frame, grid in zip(frames, label_maps):
            self.label_store.write(grid, self.layout.label_map_file(sequence, frame.frame_index))
