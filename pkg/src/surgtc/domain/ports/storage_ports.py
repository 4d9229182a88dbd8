"""
Module contenant les ports de lecture et d'écriture des artefacts sur disque.
"""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np

from surgtc.domain.entities.detection_entities import (
    ClassVocabulary,
    FrameDetections,
    SequenceDetections,
)
from surgtc.domain.entities.mask_entities import FlowField

PathLike = Union[str, Path]


class FlowStorePort(ABC):
    """
    Interface pour les adaptateurs de stockage des flux optiques.
    """

    @abstractmethod
    def read(self, path: PathLike) -> FlowField:
        """
        Lit un champ de flux.

        Args:
            path: Fichier à lire

        Returns:
            Le champ de flux
        """
        pass

    @abstractmethod
    def write(self, flow: FlowField, path: PathLike) -> None:
        """
        Écrit un champ de flux.

        Args:
            flow: Champ à écrire
            path: Fichier de destination
        """
        pass


class DetectionStorePort(ABC):
    """
    Interface pour les adaptateurs de fichiers de détections.
    """

    @abstractmethod
    def read(
        self, path: PathLike, vocabulary: ClassVocabulary, score_threshold: float
    ) -> SequenceDetections:
        """
        Lit les détections d'une séquence.

        Args:
            path: Fichier de la séquence
            vocabulary: Vocabulaire des classes autorisées
            score_threshold: Les candidats de score inférieur ou égal sont écartés

        Returns:
            La séquence, sa taille de trame et ses trames par index croissant
        """
        pass

    @abstractmethod
    def write(
        self,
        sequence: str,
        frames: List[FrameDetections],
        path: PathLike,
        frame_size: Optional[Tuple[int, int]] = None,
    ) -> None:
        """
        Écrit les détections d'une séquence.

        Args:
            sequence: Nom de la séquence
            frames: Trames à écrire
            path: Fichier de destination
            frame_size: (hauteur, largeur), obligatoire pour une séquence sans trame
        """
        pass


class LabelMapStorePort(ABC):
    """
    Interface pour les adaptateurs de cartes d'étiquettes.
    """

    @abstractmethod
    def read(self, path: PathLike, vocabulary: ClassVocabulary) -> np.ndarray:
        pass

    @abstractmethod
    def write(self, grid: np.ndarray, path: PathLike) -> None:
        pass


class VocabularyPort(ABC):
    """
    Interface pour le chargement des vocabulaires de classes.
    """

    @abstractmethod
    def load(self, name_or_path: str) -> ClassVocabulary:
        """
        Charge un vocabulaire fourni avec le paquet ou depuis un fichier.

        Args:
            name_or_path: endovis2017, endovis2018 ou chemin d'un fichier

        Returns:
            Le vocabulaire
        """
        pass
