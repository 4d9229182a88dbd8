"""
Module contenant les entités du domaine pour les détections et les vocabulaires.
"""

from dataclasses import dataclass, field, replace
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from surgtc.domain.entities.mask_entities import BinaryMask, FlowField
from surgtc.domain.errors import DataError, ShapeError, VocabularyError

BACKGROUND_ID = 0


@dataclass(frozen=True)
class Candidate:
    """
    Représente une détection dans une trame.

    Attributes:
        mask: Support du candidat
        score: Confiance du détecteur dans [0, 1]
        class_id: Classe prédite
        instance_id: Identifiant d'instance (fichiers de vérité terrain uniquement)
    """
    mask: BinaryMask
    score: float
    class_id: int
    instance_id: Optional[int] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "score", float(self.score))
        object.__setattr__(self, "class_id", int(self.class_id))
        if not 0.0 <= self.score <= 1.0:
            raise DataError(f"score hors de [0, 1]: {self.score}")

    def relabel(self, class_id: int) -> "Candidate":
        """Copie du candidat avec une autre classe; masque et score inchangés."""
        return replace(self, class_id=class_id)


@dataclass(frozen=True)
class FrameDetections:
    """
    Ensemble des candidats retenus pour une trame.

    Attributes:
        frame_index: Index de la trame (>= 0)
        height: Hauteur des trames de la séquence
        width: Largeur des trames de la séquence
        candidates: Candidats dans l'ordre du fichier
    """
    frame_index: int
    height: int
    width: int
    candidates: Tuple[Candidate, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "candidates", tuple(self.candidates))
        if self.frame_index < 0:
            raise DataError(f"index de trame négatif: {self.frame_index}")
        for candidate in self.candidates:
            if candidate.mask.shape != (self.height, self.width):
                raise ShapeError(
                    f"masque {candidate.mask.shape} dans une trame "
                    f"{(self.height, self.width)}",
                    frame=self.frame_index,
                )

    def __iter__(self) -> Iterator[Candidate]:
        return iter(self.candidates)

    def __len__(self) -> int:
        return len(self.candidates)

    def with_candidates(self, candidates: List[Candidate]) -> "FrameDetections":
        return replace(self, candidates=tuple(candidates))


@dataclass(frozen=True)
class ClassVocabulary:
    """
    Vocabulaire ordonné des classes d'instruments; 0 est le fond.

    Attributes:
        name: Nom du vocabulaire
        entries: Correspondance identifiant -> nom, identifiants 1..K
    """
    name: str
    entries: Dict[int, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        ids = sorted(self.entries)
        if ids != list(range(1, len(ids) + 1)):
            raise VocabularyError(
                f"les identifiants du vocabulaire {self.name!r} doivent couvrir 1..K: {ids}"
            )
        names = list(self.entries.values())
        if len(set(names)) != len(names):
            raise VocabularyError(f"noms de classes dupliqués dans {self.name!r}")
        object.__setattr__(self, "entries", {i: self.entries[i] for i in ids})

    @property
    def class_ids(self) -> List[int]:
        return list(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, class_id: object) -> bool:
        return class_id in self.entries

    def name_of(self, class_id: int) -> str:
        return self.entries[class_id]

    def check(self, class_id: int) -> None:
        """Lève VocabularyError si la classe est inconnue."""
        if class_id not in self.entries:
            raise VocabularyError(
                f"classe {class_id} absente du vocabulaire {self.name!r}"
            )


@dataclass(frozen=True)
class SequenceDetections:
    """
    Contenu d'un fichier de détections.

    Attributes:
        name: Nom de la séquence
        height: Hauteur des trames
        width: Largeur des trames
        frames: Trames par index croissant (éventuellement aucune)
    """
    name: str
    height: int
    width: int
    frames: List[FrameDetections]

    @property
    def frame_size(self) -> Tuple[int, int]:
        return self.height, self.width


@dataclass(frozen=True, eq=False)
class SequenceBundle:
    """
    Tout ce qu'il faut pour corriger et évaluer une séquence.

    Attributes:
        name: Nom de la séquence
        frames: Détections par trame, indices consécutifs
        flows: flows[k] est le flux arrière de la trame k+1 vers la trame k
        groundtruth: Cartes d'étiquettes de vérité terrain, une par trame
        frame_size: (hauteur, largeur) déclarée par le fichier, utile sans trame
    """
    name: str
    frames: List[FrameDetections]
    flows: List[FlowField]
    groundtruth: List[np.ndarray] = field(default_factory=list)
    frame_size: Optional[Tuple[int, int]] = None
