"""
Module contenant l'adaptateur des fichiers de détections JSON.

Un fichier par séquence:
{ "sequence", "height", "width",
  "frames": [ { "frame_index", "candidates": [ { "class_id", "score",
  "instance_id"?, "rle": { "counts": [...] } } ] } ] }

Les masques sont encodés en RLE non compressé, ordre colonne, fond d'abord.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import structlog
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from surgtc.domain.entities.detection_entities import (
    Candidate,
    ClassVocabulary,
    FrameDetections,
    SequenceDetections,
)
from surgtc.domain.entities.mask_entities import BinaryMask
from surgtc.domain.errors import FormatError, MissingInputError, SurgtcError
from surgtc.domain.ports.storage_ports import DetectionStorePort, PathLike

logger = structlog.get_logger(__name__)

DEFAULT_SCORE_THRESHOLD = 0.75


class RleRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    counts: List[int]


class CandidateRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    class_id: int
    score: float
    instance_id: Optional[int] = None
    rle: RleRecord


class FrameRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    frame_index: int
    candidates: List[CandidateRecord] = Field(default_factory=list)


class DetectionFile(BaseModel):
    """
    Schéma d'un fichier de détections.

    Attributes:
        sequence: Nom de la séquence
        height: Hauteur des trames
        width: Largeur des trames
        frames: Trames, dans un ordre quelconque
    """
    model_config = ConfigDict(extra="forbid")

    sequence: str
    height: int = Field(gt=0)
    width: int = Field(gt=0)
    frames: List[FrameRecord] = Field(default_factory=list)


def parse_detection_file(path: PathLike) -> DetectionFile:
    """
    Valide la structure d'un fichier de détections sans interpréter les masques.

    Args:
        path: Fichier à lire

    Returns:
        Le document validé
    """
    path = Path(path)
    if not path.is_file():
        raise MissingInputError("fichier de détections introuvable", path=path)
    try:
        return DetectionFile.model_validate_json(path.read_bytes())
    except ValidationError as exc:
        first = exc.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        raise FormatError(f"fichier de détections invalide ({location}: {first['msg']})", path=path)


def _to_candidate(record: CandidateRecord, document: DetectionFile) -> Candidate:
    mask = BinaryMask(document.height, document.width, tuple(record.rle.counts))
    return Candidate(
        mask=mask,
        score=record.score,
        class_id=record.class_id,
        instance_id=record.instance_id,
    )


def read_sequence(
    path: PathLike,
    vocabulary: ClassVocabulary,
    score_threshold: float = DEFAULT_SCORE_THRESHOLD,
) -> SequenceDetections:
    """
    Lit les détections d'une séquence avec la taille déclarée par le fichier.

    Tous les candidats sont validés (masque, score, classe) avant le
    filtrage: un fichier mal formé est rejeté même si ses candidats
    fautifs auraient été écartés.

    Args:
        path: Fichier de la séquence
        vocabulary: Vocabulaire des classes autorisées
        score_threshold: Seuil strict; un score égal au seuil est écarté

    Returns:
        La séquence, trames par index croissant, candidats dans l'ordre du fichier
    """
    document = parse_detection_file(path)
    frames: Dict[int, FrameDetections] = {}
    dropped = 0
    for record in document.frames:
        index = record.frame_index
        if index in frames:
            raise FormatError("index de trame dupliqué", path=path, frame=index)
        kept: List[Candidate] = []
        try:
            for candidate_record in record.candidates:
                vocabulary.check(candidate_record.class_id)
                candidate = _to_candidate(candidate_record, document)
                if candidate.score > score_threshold:
                    kept.append(candidate)
                else:
                    dropped += 1
            frames[index] = FrameDetections(index, document.height, document.width, tuple(kept))
        except SurgtcError as exc:
            raise exc.with_context(path=path, frame=index)

    logger.debug(
        "Détections lues",
        path=str(path),
        frames=len(frames),
        dropped=dropped,
        score_threshold=score_threshold,
    )
    return SequenceDetections(
        name=document.sequence,
        height=document.height,
        width=document.width,
        frames=[frames[index] for index in sorted(frames)],
    )


def read_detections(
    path: PathLike,
    vocabulary: ClassVocabulary,
    score_threshold: float = DEFAULT_SCORE_THRESHOLD,
) -> List[FrameDetections]:
    """Trames d'un fichier de détections, par index croissant."""
    return read_sequence(path, vocabulary, score_threshold).frames


def _candidate_payload(candidate: Candidate) -> Dict[str, Any]:
    payload: Dict[str, Any] = {"class_id": candidate.class_id, "score": candidate.score}
    if candidate.instance_id is not None:
        payload["instance_id"] = candidate.instance_id
    payload["rle"] = {"counts": list(candidate.mask.counts)}
    return payload


def dumps_detections(
    sequence: str,
    frames: Sequence[FrameDetections],
    frame_size: Optional[Tuple[int, int]] = None,
) -> str:
    """
    Forme canonique d'un fichier de détections.

    Args:
        sequence: Nom de la séquence
        frames: Trames, toutes de la même taille
        frame_size: (hauteur, largeur); obligatoire si la séquence n'a aucune trame

    Returns:
        Le texte JSON, indentation de deux espaces, terminé par un saut de ligne
    """
    if frame_size is None:
        if not frames:
            raise FormatError(f"séquence {sequence!r} sans trame ni taille déclarée")
        frame_size = (frames[0].height, frames[0].width)
    height, width = frame_size
    if height <= 0 or width <= 0:
        raise FormatError(f"taille de trame invalide {(height, width)}")
    for frame in frames:
        if (frame.height, frame.width) != (height, width):
            raise FormatError(
                f"taille de trame {(frame.height, frame.width)} au lieu de {(height, width)}",
                frame=frame.frame_index,
            )
    document = {
        "sequence": sequence,
        "height": height,
        "width": width,
        "frames": [
            {
                "frame_index": frame.frame_index,
                "candidates": [_candidate_payload(c) for c in frame.candidates],
            }
            for frame in frames
        ],
    }
    return json.dumps(document, indent=2) + "\n"


def write_detections(
    sequence: str,
    frames: Sequence[FrameDetections],
    path: PathLike,
    frame_size: Optional[Tuple[int, int]] = None,
) -> None:
    """
    Écrit les détections d'une séquence sous forme canonique.

    Args:
        sequence: Nom de la séquence
        frames: Trames à écrire
        path: Fichier de destination
        frame_size: (hauteur, largeur) à déclarer, déduite des trames par défaut
    """
    path = Path(path)
    text = dumps_detections(sequence, frames, frame_size)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(text.encode("utf-8"))


class JsonDetectionAdapter(DetectionStorePort):
    """
    Adaptateur de stockage des détections au format JSON.
    """

    def read(
        self,
        path: PathLike,
        vocabulary: ClassVocabulary,
        score_threshold: float = DEFAULT_SCORE_THRESHOLD,
    ) -> SequenceDetections:
        return read_sequence(path, vocabulary, score_threshold)

    def write(
        self,
        sequence: str,
        frames: List[FrameDetections],
        path: PathLike,
        frame_size: Optional[Tuple[int, int]] = None,
    ) -> None:
        write_detections(sequence, frames, path, frame_size)
