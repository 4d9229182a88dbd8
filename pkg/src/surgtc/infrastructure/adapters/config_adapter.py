"""
Module contenant le chargement des fichiers de configuration JSON.
"""

import json
from pathlib import Path
from typing import Type, TypeVar

from pydantic import BaseModel, ValidationError

from surgtc.domain.errors import ConfigError, MissingInputError
from surgtc.domain.ports.storage_ports import PathLike
from surgtc.domain.services.synth_service import SimulationPlan

ModelT = TypeVar("ModelT", bound=BaseModel)


def load_model(path: PathLike, model: Type[ModelT]) -> ModelT:
    """
    Lit et valide un fichier JSON.

    Args:
        path: Fichier de configuration
        model: Modèle pydantic attendu

    Returns:
        La configuration validée
    """
    path = Path(path)
    if not path.is_file():
        raise MissingInputError("fichier de configuration introuvable", path=path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"JSON invalide: {exc}", path=path)
    try:
        return model.model_validate(payload)
    except ValidationError as exc:
        first = exc.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        raise ConfigError(f"configuration invalide ({location}: {first['msg']})", path=path)


def load_simulation_plan(path: PathLike) -> SimulationPlan:
    return load_model(path, SimulationPlan)
