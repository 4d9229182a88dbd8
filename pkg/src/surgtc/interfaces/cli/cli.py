"""
Module contenant l'interface en ligne de commande de surgtc.

Les commandes click construisent une requête via le CLIAdapter, la confient
au PipelineRunner et traduisent la réponse en sortie et en code de retour:
0 succès, 1 erreur d'usage, 2 erreur de données ou de format.
"""

import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import click

from surgtc import __version__
from surgtc.core import CLIAdapter, ExitCode, PipelineRunner, configure_logging
from surgtc.domain.entities.temporal_entities import PROFILE_THRESHOLDS, AssignmentStrategy
from surgtc.domain.errors import SurgtcError
from surgtc.infrastructure.adapters.json_detection_adapter import DEFAULT_SCORE_THRESHOLD


STRATEGIES = [strategy.value for strategy in AssignmentStrategy]
FOLDER = click.Path(file_okay=False, path_type=Path)


class CLI:
    """
    Interface en ligne de commande de surgtc.

    Le runner n'est créé qu'à la première commande, après la configuration
    du logging.
    """

    def __init__(self, workers: Optional[int] = None):
        """
        Initialise l'interface CLI.

        Args:
            workers: Taille du pool (par défaut SURGTC_THREADS ou le nombre de CPU)
        """
        self.adapter = CLIAdapter()
        self.workers = workers
        self._runner: Optional[PipelineRunner] = None

    @property
    def runner(self) -> PipelineRunner:
        if self._runner is None:
            self._runner = PipelineRunner(workers=self.workers)
        return self._runner

    def dispatch(self, command: str, options: Dict[str, Any]) -> int:
        """
        Exécute une commande et affiche son résultat.

        Args:
            command: Nom de la commande CLI
            options: Options click de la commande

        Returns:
            Le code de sortie
        """
        request = self.adapter.translate_to_core(command, options)
        try:
            runner = self.runner
        except SurgtcError as exc:
            click.echo(f"Error: {exc}", err=True)
            return int(ExitCode.DATA)
        response = runner.execute_command(request)
        output = self.adapter.translate_from_core(response)

        if response.ok:
            table = response.data.get("table")
            if table:
                click.echo(table, nl=False)
            click.echo(output)
        else:
            for result in response.data.get("results", []):
                if result.get("diff"):
                    click.echo(result["diff"], err=True, nl=False)
            click.echo(output, err=True)
        return self.adapter.exit_code(response)


def _common_options(function: Callable) -> Callable:
    decorators = [
        click.option(
            "--detections", type=FOLDER, required=True, help="Dossier des fichiers <séquence>.json"
        ),
        click.option(
            "--vocab",
            "vocabulary",
            default="endovis2017",
            show_default=True,
            help="endovis2017, endovis2018 ou chemin d'un fichier de vocabulaire",
        ),
        click.option(
            "--score-threshold",
            type=click.FloatRange(0.0, 1.0),
            default=DEFAULT_SCORE_THRESHOLD,
            show_default=True,
            help="Les candidats de score inférieur ou égal sont écartés",
        ),
        click.option(
            "--sequence",
            "sequences",
            multiple=True,
            help="Ne traiter que cette séquence (répétable)",
        ),
        click.option("--output", type=FOLDER, required=True, help="Dossier de sortie"),
    ]
    for decorator in reversed(decorators):
        function = decorator(function)
    return function


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="surgtc")
@click.option(
    "-v", "--verbose", is_flag=True, help="Journal détaillé (un événement par réaffectation)"
)
@click.option(
    "--threads", type=click.IntRange(min=1), default=None, help="Taille du pool de workers"
)
@click.pass_context
def cli(ctx: click.Context, verbose: bool, threads: Optional[int]) -> None:
    """Cohérence temporelle pour la segmentation d'instruments chirurgicaux."""
    configure_logging(verbose)
    ctx.obj = CLI(workers=threads)


@cli.command()
@_common_options
@click.option("--flows", type=FOLDER, default=None, help="Dossier des flux <séquence>/<index>.flo")
@click.option(
    "--frames", type=click.IntRange(min=0), default=None, help="Nombre f de trames précédentes [6]"
)
@click.option("--iou-threshold", type=click.FloatRange(0.0, 1.0), default=None,
              help="Seuil strict U d'appariement [selon le profil]")
@click.option(
    "--assignment",
    type=click.Choice(STRATEGIES),
    default=None,
    help="Réaffectation [weighted_mode]",
)
@click.option("--profile", type=click.Choice(sorted(PROFILE_THRESHOLDS)), default=None,
              help="endovis2018 fixe U=0.5 sauf --iou-threshold explicite")
@click.pass_context
def correct(ctx: click.Context, **options: Any) -> None:
    """Corrige les classes des détections de chaque séquence."""
    ctx.exit(ctx.obj.dispatch("correct", options))


@cli.command()
@_common_options
@click.option(
    "--groundtruth", type=FOLDER, required=True, help="Dossier des cartes <séquence>/<index>.pgm"
)
@click.pass_context
def evaluate(ctx: click.Context, **options: Any) -> None:
    """Évalue des détections contre les cartes de vérité terrain."""
    ctx.exit(ctx.obj.dispatch("evaluate", options))


@cli.command()
@_common_options
@click.option("--flows", type=FOLDER, required=True, help="Dossier des flux <séquence>/<index>.flo")
@click.option(
    "--groundtruth", type=FOLDER, required=True, help="Dossier des cartes <séquence>/<index>.pgm"
)
@click.option(
    "--grid-threshold",
    "grid_thresholds",
    type=click.FloatRange(0.0, 1.0),
    multiple=True,
    help="Valeur de U (répétable) [0 0.5]",
)
@click.option("--grid-frames", "grid_frames", type=click.IntRange(min=0), multiple=True,
              help="Valeur de f (répétable) [3 5 7]")
@click.option("--grid-assignment", "grid_assignments", type=click.Choice(STRATEGIES), multiple=True,
              help="Réaffectation (répétable) [max weighted_mode]")
@click.pass_context
def ablate(ctx: click.Context, **options: Any) -> None:
    """Évalue une grille de configurations du module temporel."""
    ctx.exit(ctx.obj.dispatch("ablate", options))


@cli.command()
@click.option("--config", type=click.Path(dir_okay=False, path_type=Path), required=True,
              help="Plan de simulation JSON")
@click.option("--output", type=FOLDER, required=True, help="Dossier du jeu de données généré")
@click.pass_context
def simulate(ctx: click.Context, **options: Any) -> None:
    """Génère un jeu de données synthétique avec flux exacts."""
    ctx.exit(ctx.obj.dispatch("simulate", options))


@cli.command("verify-fixtures")
@click.argument("root", type=FOLDER, default=Path("fixtures"))
@click.pass_context
def verify_fixtures(ctx: click.Context, **options: Any) -> None:
    """Rejoue les micro-fixtures et compare leurs sorties octet par octet."""
    ctx.exit(ctx.obj.dispatch("verify-fixtures", options))


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Exécute la CLI sans quitter le processus.

    Args:
        argv: Arguments (sys.argv[1:] si None)

    Returns:
        Le code de sortie
    """
    args: List[str] = list(sys.argv[1:] if argv is None else argv)
    try:
        result = cli.main(args=args, prog_name="surgtc", standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return int(ExitCode.USAGE)
    except click.ClickException as exc:
        exc.show()
        return int(ExitCode.USAGE)
    except click.exceptions.Abort:
        click.echo("Aborted!", err=True)
        return int(ExitCode.USAGE)
    return int(result or 0)


def main() -> None:
    """Point d'entrée principal de l'interface CLI."""
    sys.exit(run())


if __name__ == "__main__":
    main()
