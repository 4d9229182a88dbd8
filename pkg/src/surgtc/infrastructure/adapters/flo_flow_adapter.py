"""
Module contenant l'adaptateur des fichiers de flux .flo (convention Middlebury).

Petit-boutiste: marqueur float32 202021.25 ("PIEH"), largeur int32,
hauteur int32, puis hauteur x largeur couples (u, v) float32 ligne par ligne.
"""

from pathlib import Path

import numpy as np

from surgtc.domain.entities.mask_entities import FlowField
from surgtc.domain.errors import FormatError, MissingInputError, SurgtcError
from surgtc.domain.ports.storage_ports import FlowStorePort, PathLike

FLO_TAG = 202021.25
HEADER_SIZE = 12


def read_flo(path: PathLike) -> FlowField:
    """
    Lit un fichier .flo.

    Args:
        path: Fichier à lire

    Returns:
        Le champ de flux, valeurs float32 inchangées
    """
    path = Path(path)
    if not path.is_file():
        raise MissingInputError("fichier de flux introuvable", path=path)
    data = path.read_bytes()
    if len(data) < HEADER_SIZE:
        raise FormatError("en-tête .flo tronqué", path=path)
    tag = np.frombuffer(data, dtype="<f4", count=1)[0]
    if tag != np.float32(FLO_TAG):
        raise FormatError("marqueur .flo invalide (PIEH attendu)", path=path)
    width, height = (int(x) for x in np.frombuffer(data, dtype="<i4", count=2, offset=4))
    if width <= 0 or height <= 0:
        raise FormatError(f"dimensions .flo invalides: {width}x{height}", path=path)
    expected = HEADER_SIZE + width * height * 8
    if len(data) != expected:
        raise FormatError(
            f"charge utile .flo de {len(data)} octets au lieu de {expected}", path=path
        )
    values = np.frombuffer(data, dtype="<f4", offset=HEADER_SIZE).reshape(height, width, 2)
    try:
        return FlowField(u=values[..., 0], v=values[..., 1])
    except SurgtcError as exc:
        raise exc.with_context(path=path)


def write_flo(flow: FlowField, path: PathLike) -> None:
    """
    Écrit un fichier .flo.

    Args:
        flow: Champ à écrire
        path: Fichier de destination
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = np.array([FLO_TAG], dtype="<f4").tobytes()
    header += np.array([flow.width, flow.height], dtype="<i4").tobytes()
    payload = np.stack([flow.u, flow.v], axis=-1).astype("<f4").tobytes()
    path.write_bytes(header + payload)


class FloFlowAdapter(FlowStorePort):
    """
    Adaptateur de stockage des flux au format .flo.
    """

    def read(self, path: PathLike) -> FlowField:
        return read_flo(path)

    def write(self, flow: FlowField, path: PathLike) -> None:
        write_flo(flow, path)
