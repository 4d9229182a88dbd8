"""
Module contenant les entités du domaine pour les masques et les flux optiques.
"""

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from surgtc.domain.errors import DataError, FormatError, ShapeError


@dataclass(frozen=True)
class BinaryMask:
    """
    Support de pixels d'un candidat, encodé en RLE.

    Les runs alternent fond/objet, en balayage colonne par colonne,
    en commençant toujours par un run de fond (éventuellement nul).

    Attributes:
        height: Hauteur en pixels
        width: Largeur en pixels
        counts: Longueurs des runs
    """
    height: int
    width: int
    counts: Tuple[int, ...]
    _pixels: np.ndarray = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        if self.height <= 0 or self.width <= 0:
            raise ShapeError(f"dimensions de masque invalides: {self.height}x{self.width}")
        counts = tuple(int(c) for c in self.counts)
        if any(c < 0 for c in counts):
            raise FormatError("longueur de run négative dans le RLE")
        if sum(counts) != self.height * self.width:
            raise FormatError(
                f"le RLE couvre {sum(counts)} pixels au lieu de {self.height * self.width}"
            )
        object.__setattr__(self, "counts", counts)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.height, self.width)

    @property
    def area(self) -> int:
        """Nombre de pixels objet (somme des runs d'indice impair)."""
        return sum(self.counts[1::2])

    def to_array(self) -> np.ndarray:
        """
        Décode le masque en grille booléenne (lecture seule, mise en cache).

        Returns:
            Tableau booléen de forme (height, width)
        """
        if self._pixels is None:
            values = np.arange(len(self.counts)) % 2 == 1
            flat = np.repeat(values, np.asarray(self.counts, dtype=np.int64))
            pixels = flat.reshape((self.height, self.width), order="F")
            pixels.flags.writeable = False
            object.__setattr__(self, "_pixels", pixels)
        return self._pixels

    @classmethod
    def from_array(cls, pixels: np.ndarray) -> "BinaryMask":
        """
        Encode une grille binaire dense.

        Args:
            pixels: Grille 2D (toute valeur non nulle est de l'objet)

        Returns:
            Le masque encodé
        """
        grid = np.asarray(pixels)
        if grid.ndim != 2 or grid.shape[0] <= 0 or grid.shape[1] <= 0:
            raise ShapeError(f"grille de forme invalide: {grid.shape}")
        flat = grid.astype(bool).ravel(order="F")
        changes = np.flatnonzero(flat[1:] != flat[:-1]) + 1
        bounds = np.concatenate(([0], changes, [flat.size]))
        counts = np.diff(bounds).tolist()
        if flat[0]:
            counts.insert(0, 0)
        return cls(height=grid.shape[0], width=grid.shape[1], counts=tuple(counts))


@dataclass(frozen=True, eq=False)
class FlowField:
    """
    Flux optique arrière dense pour une paire de trames.

    Les déplacements sont stockés en float32, la précision du format .flo.

    Attributes:
        u: Déplacement horizontal par pixel, forme (height, width)
        v: Déplacement vertical par pixel, forme (height, width)
    """
    u: np.ndarray
    v: np.ndarray

    def __post_init__(self) -> None:
        u = np.array(self.u, dtype=np.float32)
        v = np.array(self.v, dtype=np.float32)
        if u.ndim != 2 or u.shape != v.shape or u.size == 0:
            raise ShapeError(f"composantes de flux incompatibles: {u.shape} / {v.shape}")
        if not (np.isfinite(u).all() and np.isfinite(v).all()):
            raise DataError("le flux contient des valeurs non finies")
        u.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def height(self) -> int:
        return int(self.u.shape[0])

    @property
    def width(self) -> int:
        return int(self.u.shape[1])

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.height, self.width)

    @classmethod
    def constant(cls, height: int, width: int, u: float, v: float) -> "FlowField":
        """Champ de déplacement uniforme."""
        return cls(
            u=np.full((height, width), u, dtype=np.float32),
            v=np.full((height, width), v, dtype=np.float32),
        )

    @classmethod
    def zeros(cls, height: int, width: int) -> "FlowField":
        return cls.constant(height, width, 0.0, 0.0)

    def equals(self, other: "FlowField") -> bool:
        """Égalité bit à bit des deux composantes."""
        return (
            self.shape == other.shape
            and self.u.tobytes() == other.u.tobytes()
            and self.v.tobytes() == other.v.tobytes()
        )
