"""
Module contenant les entités du module de cohérence temporelle.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Tuple

from pydantic import BaseModel, ConfigDict, Field

from surgtc.domain.entities.detection_entities import Candidate
from surgtc.domain.errors import ConfigError


class AssignmentStrategy(str, Enum):
    """Fonctions de réaffectation de classe supportées."""
    WEIGHTED_MODE = "weighted_mode"
    MAX = "max"


PROFILE_THRESHOLDS = {
    "endovis2017": 0.0,
    "endovis2018": 0.5,
}


class TemporalConfig(BaseModel):
    """
    Paramètres du module de cohérence temporelle.

    Attributes:
        window_f: Nombre de trames précédentes prises en compte
        iou_threshold_u: Seuil strict d'IoU pour accepter un appariement
        assignment_strategy: Fonction de réaffectation
    """
    model_config = ConfigDict(frozen=True)

    window_f: int = Field(default=6, ge=0)
    iou_threshold_u: float = Field(default=0.0, ge=0.0, le=1.0)
    assignment_strategy: AssignmentStrategy = AssignmentStrategy.WEIGHTED_MODE

    @classmethod
    def for_profile(cls, profile: str, **overrides: Any) -> "TemporalConfig":
        """
        Configuration finale d'un jeu de données (f=6, U selon le profil).

        Args:
            profile: endovis2017 ou endovis2018
            overrides: Champs à remplacer

        Returns:
            La configuration
        """
        if profile not in PROFILE_THRESHOLDS:
            raise ConfigError(
                f"profil inconnu: {profile!r} (attendu: {', '.join(PROFILE_THRESHOLDS)})"
            )
        values = {"iou_threshold_u": PROFILE_THRESHOLDS[profile]}
        values.update(overrides)
        return cls(**values)


@dataclass(frozen=True)
class Predecessor:
    """Entrée appariée d'une trame précédente."""
    frame_index: int
    class_id: int
    score: float


@dataclass(frozen=True)
class InstanceWindow:
    """
    Un candidat de la trame courante et ses prédécesseurs appariés.

    Attributes:
        current: Candidat de la trame t
        matched_predecessors: Au plus un par trame précédente, indices croissants
    """
    current: Candidate
    matched_predecessors: Tuple[Predecessor, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "matched_predecessors", tuple(self.matched_predecessors))

    def entries(self) -> Tuple[Tuple[int, float], ...]:
        """
        Couples (classe, score) du plus ancien au plus récent, courant inclus.
        """
        return tuple((p.class_id, p.score) for p in self.matched_predecessors) + (
            (self.current.class_id, self.current.score),
        )
