"""
Module contenant la vérification des micro-fixtures.

Chaque fixture vit dans fixtures/<nom>/ avec un fixture.json:
{ "name", "provenance", "argv", "outputs" }. argv est une ligne de commande
surgtc où {fixture} et {output} désignent le dossier de la fixture et un
dossier temporaire; outputs associe chaque fichier produit (relatif à
{output}) au fichier attendu (relatif à la fixture). La comparaison est
faite octet par octet.
"""

import difflib
import tempfile
from concurrent.futures import Executor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional

import structlog
from pydantic import BaseModel, ConfigDict

from surgtc.domain.ports.storage_ports import PathLike
from surgtc.infrastructure.adapters.config_adapter import load_model

logger = structlog.get_logger(__name__)

FIXTURE_FILE = "fixture.json"

Invoker = Callable[[List[str]], int]


class FixtureSpec(BaseModel):
    """
    Description d'une fixture.

    Attributes:
        name: Nom de la fixture
        provenance: Origine des valeurs attendues ([TRIVIAL] ou [DERIVED] et l'oracle)
        argv: Ligne de commande à exécuter
        outputs: Fichier produit -> fichier attendu
    """
    model_config = ConfigDict(frozen=True)

    name: str
    provenance: str
    argv: List[str]
    outputs: Dict[str, str]


@dataclass(frozen=True)
class FixtureResult:
    """
    Résultat de la vérification d'une fixture.

    Attributes:
        name: Nom de la fixture
        passed: Toutes les sorties sont identiques
        message: Résumé de l'échec
        diff: Différence unifiée des sorties divergentes
    """
    name: str
    passed: bool
    message: str = ""
    diff: str = ""


def _default_invoker(argv: List[str]) -> int:
    from surgtc.interfaces.cli.cli import run

    return run(argv)


def discover_fixtures(root: PathLike) -> List[Path]:
    """Dossiers de fixtures sous root, par nom croissant."""
    return sorted(path.parent for path in Path(root).glob(f"*/{FIXTURE_FILE}"))


def _unified_diff(expected: bytes, produced: bytes, expected_name: str, produced_name: str) -> str:
    lines = difflib.unified_diff(
        expected.decode("utf-8", errors="replace").splitlines(keepends=True),
        produced.decode("utf-8", errors="replace").splitlines(keepends=True),
        fromfile=expected_name,
        tofile=produced_name,
    )
    return "".join(lines)


def run_fixture(directory: PathLike, invoke: Optional[Invoker] = None) -> FixtureResult:
    """
    Exécute une fixture dans un dossier temporaire et compare ses sorties.

    Args:
        directory: Dossier de la fixture
        invoke: Exécute une ligne de commande surgtc et rend le code de sortie

    Returns:
        Le résultat
    """
    directory = Path(directory)
    invoke = invoke or _default_invoker
    spec = load_model(directory / FIXTURE_FILE, FixtureSpec)

    with tempfile.TemporaryDirectory(prefix=f"surgtc-{spec.name}-") as tmp:
        argv = [
            arg.replace("{fixture}", str(directory)).replace("{output}", tmp) for arg in spec.argv
        ]
        code = invoke(argv)
        if code != 0:
            return FixtureResult(spec.name, False, message=f"code de sortie {code}")

        diffs = []
        for produced_name, expected_name in sorted(spec.outputs.items()):
            produced_path = Path(tmp) / produced_name
            expected_path = directory / expected_name
            if not produced_path.is_file():
                return FixtureResult(spec.name, False, message=f"{produced_name} non produit")
            expected = expected_path.read_bytes() if expected_path.is_file() else b""
            produced = produced_path.read_bytes()
            if produced != expected:
                diffs.append(_unified_diff(expected, produced, expected_name, produced_name))

    if diffs:
        return FixtureResult(
            spec.name, False, message=f"{len(diffs)} sortie(s) divergente(s)", diff="".join(diffs)
        )
    return FixtureResult(spec.name, True)


def verify_fixtures(
    root: PathLike,
    invoke: Optional[Invoker] = None,
    executor: Optional[Executor] = None,
) -> List[FixtureResult]:
    """
    Vérifie toutes les fixtures d'un dossier.

    Args:
        root: Dossier contenant les fixtures
        invoke: Exécuteur de ligne de commande (par défaut la CLI en processus)
        executor: Pool optionnel; les fixtures sont indépendantes

    Returns:
        Un résultat par fixture, par nom de dossier croissant
    """
    directories = discover_fixtures(root)

    def check(directory: Path) -> FixtureResult:
        return run_fixture(directory, invoke)

    if executor is None:
        results = [check(directory) for directory in directories]
    else:
        results = list(executor.map(check, directories))
    for result in results:
        if result.passed:
            logger.info("Fixture conforme", fixture=result.name)
        else:
            logger.warning("Fixture divergente", fixture=result.name, reason=result.message)
    return results
