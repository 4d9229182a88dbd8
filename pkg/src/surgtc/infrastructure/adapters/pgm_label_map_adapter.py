"""
Module contenant l'adaptateur des cartes d'étiquettes PGM binaires (P5).

La lecture décode l'en-tête à la main et prend les octets tels quels:
une carte de maxval 7 contient directement les classes 0..7, sans la
remise à l'échelle vers 255 que ferait un décodeur d'images. L'écriture
passe par Pillow (maxval 255).
"""

from pathlib import Path
from typing import Tuple

import numpy as np
from PIL import Image

from surgtc.domain.entities.detection_entities import ClassVocabulary
from surgtc.domain.errors import DataError, FormatError, MissingInputError, ShapeError
from surgtc.domain.ports.storage_ports import LabelMapStorePort, PathLike

PGM_MAGIC = b"P5"
MAX_8BIT = 255


def _skip_blanks(data: bytes, position: int) -> int:
    while position < len(data):
        if data[position:position + 1].isspace():
            position += 1
        elif data[position:position + 1] == b"#":
            end = data.find(b"\n", position)
            position = len(data) if end < 0 else end + 1
        else:
            break
    return position


def parse_pgm_header(data: bytes, path: PathLike) -> Tuple[int, int, int, int]:
    """
    Décode l'en-tête d'un PGM binaire.

    Args:
        data: Contenu du fichier
        path: Fichier, pour les messages d'erreur

    Returns:
        (largeur, hauteur, maxval, position du premier pixel)
    """
    if data[:2] != PGM_MAGIC:
        raise FormatError("carte d'étiquettes: PGM binaire (P5) attendu", path=path)
    fields = []
    position = 2
    while len(fields) < 3:
        start = _skip_blanks(data, position)
        if start == position:
            raise FormatError("en-tête PGM invalide", path=path)
        position = start
        while data[position:position + 1].isdigit():
            position += 1
        if position == start:
            raise FormatError("en-tête PGM tronqué ou invalide", path=path)
        fields.append(int(data[start:position]))
    # un seul blanc entre maxval et les pixels
    if not data[position:position + 1].isspace():
        raise FormatError("en-tête PGM invalide après maxval", path=path)
    width, height, maxval = fields
    return width, height, maxval, position + 1


def read_label_map(path: PathLike, vocabulary: ClassVocabulary) -> np.ndarray:
    """
    Lit une carte d'étiquettes.

    Args:
        path: Fichier P5 8 bits (maxval entre 1 et 255)
        vocabulary: Les valeurs permises sont 0 et les classes du vocabulaire

    Returns:
        Grille uint8 (hauteur, largeur), valeurs du fichier inchangées
    """
    path = Path(path)
    if not path.is_file():
        raise MissingInputError("carte d'étiquettes introuvable", path=path)
    data = path.read_bytes()
    width, height, maxval, offset = parse_pgm_header(data, path)
    if width <= 0 or height <= 0:
        raise FormatError(f"dimensions PGM invalides: {width}x{height}", path=path)
    if not 1 <= maxval <= MAX_8BIT:
        raise FormatError(f"maxval {maxval}: carte d'étiquettes 8 bits attendue", path=path)
    payload = data[offset:]
    if len(payload) != width * height:
        raise FormatError(
            f"charge utile PGM de {len(payload)} octets au lieu de {width * height}", path=path
        )
    grid = np.frombuffer(payload, dtype=np.uint8).reshape(height, width).copy()
    if int(grid.max()) > maxval:
        raise FormatError(f"pixel {int(grid.max())} supérieur à maxval {maxval}", path=path)

    unknown = np.unique(grid[grid > len(vocabulary)])
    if unknown.size:
        raise DataError(
            f"valeurs hors vocabulaire {vocabulary.name!r}: {unknown.tolist()}", path=path
        )
    return grid


def write_label_map(grid: np.ndarray, path: PathLike) -> None:
    """
    Écrit une carte d'étiquettes.

    Args:
        grid: Grille 2D d'entiers dans [0, 255]
        path: Fichier de destination
    """
    grid = np.asarray(grid)
    if grid.ndim != 2 or grid.size == 0:
        raise ShapeError(f"carte d'étiquettes de forme {grid.shape}, grille 2D attendue")
    if grid.min(initial=0) < 0 or grid.max(initial=0) > MAX_8BIT:
        raise DataError("valeurs de carte d'étiquettes hors de [0, 255]")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(np.ascontiguousarray(grid, dtype=np.uint8)).save(path, format="PPM")


class PgmLabelMapAdapter(LabelMapStorePort):
    """
    Adaptateur de stockage des cartes d'étiquettes en PGM.
    """

    def read(self, path: PathLike, vocabulary: ClassVocabulary) -> np.ndarray:
        return read_label_map(path, vocabulary)

    def write(self, grid: np.ndarray, path: PathLike) -> None:
        write_label_map(grid, path)
