"""
Module contenant la hiérarchie des erreurs du domaine.

Chaque erreur porte un ``status`` (repris tel quel dans les réponses du
runner) et, lorsqu'il est connu, le fichier et la trame concernés.
"""

from pathlib import Path
from typing import Optional, Union


class SurgtcError(Exception):
    """
    Erreur racine de surgtc.

    Attributes:
        status: Identifiant court de la catégorie d'erreur
        path: Fichier concerné (optionnel)
        frame: Index de trame concerné (optionnel)
    """

    status = "error"

    def __init__(
        self,
        message: str,
        *,
        path: Optional[Union[str, Path]] = None,
        frame: Optional[int] = None,
    ):
        super().__init__(message)
        self.message = message
        self.path = str(path) if path is not None else None
        self.frame = frame

    def with_context(
        self, path: Optional[Union[str, Path]] = None, frame: Optional[int] = None
    ) -> "SurgtcError":
        """
        Complète le contexte sans écraser celui déjà présent.

        Returns:
            L'erreur elle-même
        """
        if self.path is None and path is not None:
            self.path = str(path)
        if self.frame is None and frame is not None:
            self.frame = frame
        return self

    def __str__(self) -> str:
        prefix = ""
        if self.path is not None:
            prefix += f"{self.path}: "
        if self.frame is not None:
            prefix += f"frame {self.frame}: "
        return prefix + self.message


class ShapeError(SurgtcError):
    """Dimensions incompatibles entre masques, flux ou cartes d'étiquettes."""

    status = "shape_error"


class FormatError(SurgtcError):
    """Fichier ou encodage mal formé."""

    status = "format_error"


class DataError(SurgtcError):
    """Valeurs hors domaine (flux non fini, score hors [0,1], pixel inconnu)."""

    status = "data_error"


class VocabularyError(DataError):
    """Identifiant de classe absent du vocabulaire."""

    status = "vocabulary_error"


class ContractError(SurgtcError):
    """Préconditions d'appel non respectées (trames non contiguës, flux manquants)."""

    status = "contract_error"


class ConfigError(SurgtcError):
    """Configuration invalide."""

    status = "config_error"


class NoDataError(SurgtcError):
    """Aucune trame évaluable."""

    status = "no_data"


class MissingInputError(SurgtcError):
    """Fichier d'entrée attendu introuvable."""

    status = "missing_input"
