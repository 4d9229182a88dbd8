"""
Module contenant le chargement des vocabulaires de classes.

Format texte: une ligne "id nom" par classe; lignes vides et commentaires
(#) ignorés.
"""

from importlib import resources
from pathlib import Path
from typing import Dict

from surgtc.domain.entities.detection_entities import ClassVocabulary
from surgtc.domain.errors import FormatError, MissingInputError, SurgtcError, VocabularyError
from surgtc.domain.ports.storage_ports import VocabularyPort

BUNDLED_VOCABULARIES = ("endovis2017", "endovis2018")


def parse_vocabulary(name: str, text: str) -> ClassVocabulary:
    """
    Construit un vocabulaire à partir de son texte.

    Args:
        name: Nom donné au vocabulaire
        text: Contenu du fichier

    Returns:
        Le vocabulaire
    """
    entries: Dict[int, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(maxsplit=1)
        if len(parts) != 2 or not parts[0].isdigit():
            raise FormatError(f"ligne {number}: 'id nom' attendu, lu {raw!r}")
        class_id = int(parts[0])
        if class_id in entries:
            raise VocabularyError(f"ligne {number}: identifiant {class_id} dupliqué")
        entries[class_id] = parts[1].strip()
    return ClassVocabulary(name=name, entries=entries)


def load_vocabulary(name_or_path: str) -> ClassVocabulary:
    """
    Charge un vocabulaire fourni avec le paquet, ou un fichier.

    Args:
        name_or_path: endovis2017, endovis2018 ou chemin d'un fichier texte

    Returns:
        Le vocabulaire
    """
    if name_or_path in BUNDLED_VOCABULARIES:
        resource = resources.files("surgtc") / "data" / "vocabularies" / f"{name_or_path}.txt"
        return parse_vocabulary(name_or_path, resource.read_text(encoding="utf-8"))

    path = Path(name_or_path)
    if not path.is_file():
        raise MissingInputError(
            f"vocabulaire introuvable (fournis: {', '.join(BUNDLED_VOCABULARIES)})", path=path
        )
    try:
        return parse_vocabulary(path.stem, path.read_text(encoding="utf-8"))
    except SurgtcError as exc:
        raise exc.with_context(path=path)


class VocabularyAdapter(VocabularyPort):
    def load(self, name_or_path: str) -> ClassVocabulary:
        return load_vocabulary(name_or_path)
