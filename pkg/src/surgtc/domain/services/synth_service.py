"""
Module contenant le générateur de séquences synthétiques.

Des objets rectangulaires ou elliptiques se déplacent à vitesse entière;
le flux arrière émis est exact, la vérité terrain est connue, et les
prédictions reçoivent un bruit de classe contrôlé. C'est l'oracle de
vérification du module de cohérence temporelle.
"""

from typing import List, Literal, NamedTuple, Tuple

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field, model_validator

from surgtc.domain.entities.detection_entities import Candidate, FrameDetections
from surgtc.domain.entities.mask_entities import BinaryMask, FlowField
from surgtc.domain.errors import ConfigError
from surgtc.domain.services.mask_ops import warp

logger = structlog.get_logger(__name__)


class ObjectSpec(BaseModel):
    """
    Objet synthétique.

    Attributes:
        shape: rectangle ou ellipse (inscrite dans la boîte)
        size: (hauteur, largeur) de la boîte
        origin: (ligne, colonne) du coin haut-gauche à la trame 0
        velocity: (vx, vy) en pixels par trame
        class_id: Vraie classe
    """
    model_config = ConfigDict(frozen=True)

    shape: Literal["rectangle", "ellipse"] = "rectangle"
    size: Tuple[int, int]
    origin: Tuple[int, int]
    velocity: Tuple[int, int] = (0, 0)
    class_id: int = Field(ge=1)

    @model_validator(mode="after")
    def _positive_size(self) -> "ObjectSpec":
        if self.size[0] < 1 or self.size[1] < 1:
            raise ValueError(f"taille d'objet invalide: {self.size}")
        return self

    def top_left(self, t: int) -> Tuple[int, int]:
        return (self.origin[0] + self.velocity[1] * t, self.origin[1] + self.velocity[0] * t)


class NoiseSpec(BaseModel):
    """
    Bruit du détecteur simulé.

    Attributes:
        flip_probability: Probabilité de remplacer la classe par une autre, par objet et par trame
        correct_score: Intervalle des scores quand la classe est juste
        flipped_score: Intervalle des scores quand la classe est fausse
    """
    model_config = ConfigDict(frozen=True)

    flip_probability: float = Field(default=0.0, ge=0.0, le=1.0)
    correct_score: Tuple[float, float] = (0.9, 0.9)
    flipped_score: Tuple[float, float] = (0.9, 0.9)

    @model_validator(mode="after")
    def _score_ranges(self) -> "NoiseSpec":
        for low, high in (self.correct_score, self.flipped_score):
            if not 0.0 <= low <= high <= 1.0:
                raise ValueError(f"intervalle de score invalide: ({low}, {high})")
        return self


class SynthConfig(BaseModel):
    """
    Configuration d'une séquence synthétique.

    Attributes:
        frames: Nombre de trames
        height: Hauteur des trames
        width: Largeur des trames
        num_classes: Taille du vocabulaire (classes 1..num_classes)
        objects: Objets de la scène
        noise: Bruit de classe des prédictions
        seed: Graine du générateur aléatoire
    """
    model_config = ConfigDict(frozen=True)

    frames: int = Field(ge=1)
    height: int = Field(ge=3)
    width: int = Field(ge=3)
    num_classes: int = Field(default=7, ge=1, le=255)
    objects: List[ObjectSpec] = Field(default_factory=list)
    noise: NoiseSpec = NoiseSpec()
    seed: int = 0

    @model_validator(mode="after")
    def _objects_inside(self) -> "SynthConfig":
        if self.noise.flip_probability > 0 and self.num_classes < 2:
            raise ValueError("il faut au moins deux classes pour inverser une étiquette")
        for index, obj in enumerate(self.objects):
            if obj.class_id > self.num_classes:
                raise ValueError(f"objet {index}: classe {obj.class_id} > {self.num_classes}")
            # mouvement linéaire: les positions extrêmes suffisent
            for t in (0, self.frames - 1):
                row, col = obj.top_left(t)
                if (
                    row < 1
                    or col < 1
                    or row + obj.size[0] > self.height - 1
                    or col + obj.size[1] > self.width - 1
                ):
                    raise ValueError(
                        f"objet {index}: sort de l'image (marge de 1 px) à la trame {t}"
                    )
        return self


class SyntheticSequence(NamedTuple):
    """Sorties du générateur."""
    predictions: List[FrameDetections]
    groundtruth: List[FrameDetections]
    flows: List[FlowField]
    label_maps: List[np.ndarray]


def _stamp(obj: ObjectSpec) -> np.ndarray:
    height, width = obj.size
    if obj.shape == "rectangle":
        return np.ones((height, width), dtype=bool)
    rows, cols = np.indices((height, width), dtype=np.float64)
    cy, cx = (height - 1) / 2.0, (width - 1) / 2.0
    return ((rows - cy) / (height / 2.0)) ** 2 + ((cols - cx) / (width / 2.0)) ** 2 <= 1.0


def _support(config: SynthConfig, obj: ObjectSpec, stamp: np.ndarray, t: int) -> np.ndarray:
    grid = np.zeros((config.height, config.width), dtype=bool)
    row, col = obj.top_left(t)
    grid[row:row + obj.size[0], col:col + obj.size[1]] = stamp
    return grid


def _draw_score(rng: np.random.Generator, bounds: Tuple[float, float]) -> float:
    low, high = bounds
    if low == high:
        return float(low)
    return round(float(rng.uniform(low, high)), 4)


def generate(config: SynthConfig) -> SyntheticSequence:
    """
    Génère une séquence.

    Args:
        config: Configuration validée

    Returns:
        (prédictions bruitées, vérité terrain par instances, flux arrière, cartes d'étiquettes);
        flows[k] est le flux de la trame k+1 vers la trame k
    """
    rng = np.random.default_rng(config.seed)
    stamps = [_stamp(obj) for obj in config.objects]
    supports = [
        [_support(config, obj, stamp, t) for obj, stamp in zip(config.objects, stamps)]
        for t in range(config.frames)
    ]

    for t, frame_supports in enumerate(supports):
        occupied = np.zeros((config.height, config.width), dtype=np.int64)
        for support in frame_supports:
            occupied += support
        if (occupied > 1).any():
            raise ConfigError(f"des objets se chevauchent à la trame {t}", frame=t)

    predictions: List[FrameDetections] = []
    groundtruth: List[FrameDetections] = []
    label_maps: List[np.ndarray] = []
    flips = 0
    for t, frame_supports in enumerate(supports):
        predicted: List[Candidate] = []
        truth: List[Candidate] = []
        labels = np.zeros((config.height, config.width), dtype=np.uint8)
        for index, (obj, support) in enumerate(zip(config.objects, frame_supports)):
            mask = BinaryMask.from_array(support)
            class_id = obj.class_id
            if rng.random() < config.noise.flip_probability:
                offset = int(rng.integers(1, config.num_classes))
                class_id = (obj.class_id - 1 + offset) % config.num_classes + 1
                score = _draw_score(rng, config.noise.flipped_score)
                flips += 1
            else:
                score = _draw_score(rng, config.noise.correct_score)
            predicted.append(Candidate(mask=mask, score=score, class_id=class_id))
            truth.append(
                Candidate(mask=mask, score=1.0, class_id=obj.class_id, instance_id=index + 1)
            )
            labels[support] = obj.class_id
        predictions.append(FrameDetections(t, config.height, config.width, tuple(predicted)))
        groundtruth.append(FrameDetections(t, config.height, config.width, tuple(truth)))
        label_maps.append(labels)

    flows = [_backward_flow(config, supports, t) for t in range(1, config.frames)]
    logger.debug(
        "Séquence synthétique générée",
        frames=config.frames,
        objects=len(config.objects),
        flips=flips,
        seed=config.seed,
    )
    return SyntheticSequence(predictions, groundtruth, flows, label_maps)


def _backward_flow(config: SynthConfig, supports: List[List[np.ndarray]], t: int) -> FlowField:
    """
    Flux de la trame t vers t-1: (-vx, -vy) sur le support de l'objet en t et
    sur les pixels qu'il a quittés depuis t-1, 0 ailleurs.
    """
    u = np.zeros((config.height, config.width), dtype=np.float32)
    v = np.zeros((config.height, config.width), dtype=np.float32)
    claimed = np.zeros((config.height, config.width), dtype=bool)
    for obj, before, after in zip(config.objects, supports[t - 1], supports[t]):
        swept = before | after
        if (claimed & swept).any():
            raise ConfigError(
                f"objets trop proches pour un flux sans ambiguïté à la trame {t}", frame=t
            )
        claimed |= swept
        u[swept] = -obj.velocity[0]
        v[swept] = -obj.velocity[1]
    flow = FlowField(u=u, v=v)

    for index, (before, after) in enumerate(zip(supports[t - 1], supports[t])):
        if warp(BinaryMask.from_array(before), flow) != BinaryMask.from_array(after):
            raise ConfigError(
                f"objet {index}: le flux émis ne reproduit pas son déplacement à la trame {t}",
                frame=t,
            )
    return flow


class SimulationPlan(BaseModel):
    """
    Jeu de données synthétique: plusieurs séquences de même configuration.

    La séquence i s'appelle seq_<i:02d> et utilise la graine synth.seed + i.

    Attributes:
        sequences: Nombre de séquences
        synth: Configuration commune
    """
    model_config = ConfigDict(frozen=True)

    sequences: int = Field(default=1, ge=0)
    synth: SynthConfig

    def sequence_name(self, index: int) -> str:
        return f"seq_{index:02d}"

    def sequence_config(self, index: int) -> SynthConfig:
        return self.synth.model_copy(update={"seed": self.synth.seed + index})
