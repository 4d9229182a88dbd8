"""
Module contenant la sérialisation des rapports de métriques et d'ablation.

Deux sorties: un JSON (valeurs brutes dans [0, 1]) et un tableau texte
aligné, en pourcentage avec deux décimales, rendu par rich sans couleur.
"""

import io
import json
from pathlib import Path
from typing import Any, Dict, List, Optional

from rich import box
from rich.console import Console
from rich.table import Table

from surgtc.domain.entities.detection_entities import ClassVocabulary
from surgtc.domain.entities.metric_entities import AblationTable, MetricReport
from surgtc.domain.ports.storage_ports import PathLike

TABLE_WIDTH = 240
ABSENT = "-"


def report_to_dict(report: MetricReport, vocabulary: ClassVocabulary) -> Dict[str, Any]:
    return {
        "challenge_iou": report.challenge_iou,
        "eq1_iou": report.eq1_iou,
        "per_class_iou": [
            {"class_id": class_id, "name": vocabulary.name_of(class_id), "iou": value}
            for class_id, value in report.per_class_iou.items()
        ],
        "mean_class_iou": report.mean_class_iou,
        "frames_evaluated": report.frames_evaluated,
    }


def ablation_to_dict(table: AblationTable, vocabulary: ClassVocabulary) -> Dict[str, Any]:
    return {
        "baseline": report_to_dict(table.baseline, vocabulary),
        "rows": [
            {
                "threshold": row.threshold,
                "frames": row.frames,
                "assignment": row.strategy.value,
                "report": report_to_dict(row.report, vocabulary),
            }
            for row in table.rows
        ],
    }


def _percent(value: Optional[float]) -> str:
    return ABSENT if value is None else f"{100.0 * value:.2f}"


def _render(table: Table) -> str:
    buffer = io.StringIO()
    console = Console(
        file=buffer,
        width=TABLE_WIDTH,
        color_system=None,
        force_terminal=False,
        highlight=False,
        emoji=False,
    )
    console.print(table)
    return buffer.getvalue()


def render_report(report: MetricReport, vocabulary: ClassVocabulary) -> str:
    """
    Tableau texte d'un rapport de métriques.

    Args:
        report: Rapport à afficher
        vocabulary: Donne le nom des colonnes de classe

    Returns:
        Le tableau, une ligne par rangée
    """
    table = Table(box=box.ASCII2, show_edge=True)
    headers = ["challenge IoU", "IoU"]
    headers += [vocabulary.name_of(c) for c in report.per_class_iou]
    headers.append("mean class IoU")
    for header in headers:
        table.add_column(header, justify="right", no_wrap=True)
    table.add_row(
        _percent(report.challenge_iou),
        _percent(report.eq1_iou),
        *[_percent(v) for v in report.per_class_iou.values()],
        _percent(report.mean_class_iou),
    )
    return _render(table)


def render_ablation(ablation: AblationTable, vocabulary: ClassVocabulary) -> str:
    """
    Tableau texte d'une ablation: une ligne par cellule, la référence sans
    correction en premier.
    """
    class_ids: List[int] = list(ablation.baseline.per_class_iou)
    table = Table(box=box.ASCII2, show_edge=True)
    table.add_column("Threshold", justify="right", no_wrap=True)
    table.add_column("Frames", justify="right", no_wrap=True)
    table.add_column("Assignment", no_wrap=True)
    for class_id in class_ids:
        table.add_column(vocabulary.name_of(class_id), justify="right", no_wrap=True)
    table.add_column("mean class IoU", justify="right", no_wrap=True)

    def cells(report: MetricReport) -> List[str]:
        return [_percent(report.per_class_iou.get(c)) for c in class_ids] + [
            _percent(report.mean_class_iou)
        ]

    table.add_row(ABSENT, ABSENT, "none", *cells(ablation.baseline), end_section=True)
    for row in ablation.rows:
        table.add_row(f"{row.threshold:g}", str(row.frames), row.strategy.value, *cells(row.report))
    return _render(table)


def _write_json(payload: Dict[str, Any], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes((json.dumps(payload, indent=2) + "\n").encode("utf-8"))


def _write_text(text: str, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(text.encode("utf-8"))


def write_report(report: MetricReport, vocabulary: ClassVocabulary, output: PathLike) -> str:
    """
    Écrit report.json et report.txt dans le dossier de sortie.

    Returns:
        Le tableau texte
    """
    output = Path(output)
    text = render_report(report, vocabulary)
    _write_json(report_to_dict(report, vocabulary), output / "report.json")
    _write_text(text, output / "report.txt")
    return text


def write_ablation(ablation: AblationTable, vocabulary: ClassVocabulary, output: PathLike) -> str:
    """
    Écrit ablation.json et ablation.txt dans le dossier de sortie.

    Returns:
        Le tableau texte
    """
    output = Path(output)
    text = render_ablation(ablation, vocabulary)
    _write_json(ablation_to_dict(ablation, vocabulary), output / "ablation.json")
    _write_text(text, output / "ablation.txt")
    return text
