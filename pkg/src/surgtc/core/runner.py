"""
surgtc Pipeline Runner - executes batch commands

The runner is the single place where ingestion, temporal correction, metrics
and reports are wired together. Sequences are independent and run in a
thread pool; results are always collected and written in sequence-name
order, so outputs do not depend on the pool size.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import structlog
from dotenv import load_dotenv
from pydantic import ValidationError

from surgtc.application.fixture_service import Invoker, verify_fixtures
from surgtc.domain.entities.detection_entities import (
    ClassVocabulary,
    FrameDetections,
    SequenceBundle,
)
from surgtc.domain.entities.metric_entities import AblationGrid
from surgtc.domain.entities.temporal_entities import AssignmentStrategy, TemporalConfig
from surgtc.domain.errors import ConfigError, ShapeError, SurgtcError
from surgtc.domain.ports.storage_ports import VocabularyPort
from surgtc.domain.services.ablation_service import ablate, label_pairs
from surgtc.domain.services.metric_service import evaluate
from surgtc.domain.services.synth_service import SimulationPlan, generate
from surgtc.domain.services.temporal_service import correct_sequence
from surgtc.infrastructure.adapters.config_adapter import load_simulation_plan
from surgtc.infrastructure.adapters.dataset_adapter import DatasetAdapter, DatasetLayout
from surgtc.infrastructure.adapters.report_adapter import (
    ablation_to_dict,
    report_to_dict,
    write_ablation,
    write_report,
)
from surgtc.infrastructure.adapters.vocabulary_adapter import VocabularyAdapter

from .api import CommandType, CoreAPI, CoreRequest, CoreResponse, ResponseType, RunManifest

THREADS_ENV = "SURGTC_THREADS"
VOCABULARY_FILE = "vocabulary.txt"

logger = structlog.get_logger(__name__)


def resolve_workers(requested: Optional[int] = None) -> int:
    """
    Size of the worker pool.

    Args:
        requested: explicit size; otherwise SURGTC_THREADS (a .env file is
            honoured), otherwise the CPU count

    Returns:
        A positive pool size
    """
    if requested is not None:
        value: Any = requested
    else:
        load_dotenv()
        value = os.environ.get(THREADS_ENV) or os.cpu_count() or 1
    try:
        workers = int(value)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {value!r}")
    if workers < 1:
        raise ConfigError(f"worker pool size must be positive, got {workers}")
    return workers


class PipelineRunner(CoreAPI):
    """
    Executes correct / evaluate / simulate / ablate / verify_fixtures requests.
    """

    def __init__(
        self,
        workers: Optional[int] = None,
        vocabularies: Optional[VocabularyPort] = None,
        fixture_invoker: Optional[Invoker] = None,
    ):
        """
        Initialize the runner.

        Args:
            workers: worker pool size (default: resolve_workers())
            vocabularies: vocabulary loader
            fixture_invoker: command line executor used by verify_fixtures
        """
        self.workers = resolve_workers(workers)
        self.vocabularies = vocabularies or VocabularyAdapter()
        self.fixture_invoker = fixture_invoker
        self.handlers: Dict[CommandType, Callable[[CoreRequest], CoreResponse]] = {
            CommandType.CORRECT: self._handle_correct,
            CommandType.EVALUATE: self._handle_evaluate,
            CommandType.SIMULATE: self._handle_simulate,
            CommandType.ABLATE: self._handle_ablate,
            CommandType.VERIFY_FIXTURES: self._handle_verify_fixtures,
        }

    def execute_command(self, request: CoreRequest) -> CoreResponse:
        """
        Execute a command and return response.

        Args:
            request: standardized core request

        Returns:
            CoreResponse; domain errors become ERROR responses carrying the
            error status and a message naming file and frame
        """
        log = logger.bind(command=request.command.value, request_id=request.request_id)
        log.debug("Executing command", interface=request.interface_type.value, workers=self.workers)
        handler = self.handlers.get(request.command)
        if handler is None:
            return CoreResponse(
                type=ResponseType.ERROR,
                status="unknown_command",
                message=f"Unknown command: {request.command.value}",
                request_id=request.request_id,
            )
        try:
            response = handler(request)
        except SurgtcError as exc:
            log.error("Command failed", status=exc.status, error=str(exc))
            return CoreResponse(
                type=ResponseType.ERROR,
                status=exc.status,
                message=str(exc),
                data={"path": exc.path, "frame": exc.frame},
                request_id=request.request_id,
            )
        response.request_id = request.request_id
        return response

    # -- helpers -------------------------------------------------------------

    def _manifest(self, request: CoreRequest) -> RunManifest:
        params = dict(request.parameters)
        try:
            params["temporal"] = self._temporal_config(params)
            fields = {
                k: v for k, v in params.items() if k in RunManifest.model_fields and v is not None
            }
            return RunManifest(**fields)
        except ValidationError as exc:
            first = exc.errors()[0]
            location = ".".join(str(part) for part in first["loc"])
            raise ConfigError(f"invalid parameters ({location}: {first['msg']})")
        except ValueError as exc:
            raise ConfigError(f"invalid parameters: {exc}")

    @staticmethod
    def _temporal_config(params: Dict[str, Any]) -> TemporalConfig:
        overrides: Dict[str, Any] = {}
        if params.get("frames") is not None:
            overrides["window_f"] = params["frames"]
        if params.get("iou_threshold") is not None:
            overrides["iou_threshold_u"] = params["iou_threshold"]
        if params.get("assignment") is not None:
            overrides["assignment_strategy"] = AssignmentStrategy(params["assignment"])
        return TemporalConfig.for_profile(params.get("profile") or "endovis2017", **overrides)

    def _map(self, function: Callable[[Any], Any], items: List[Any]) -> List[Any]:
        if self.workers == 1 or len(items) <= 1:
            return [function(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            return list(pool.map(function, items))

    def _load_bundles(
        self,
        manifest: RunManifest,
        vocabulary: ClassVocabulary,
        with_flows: bool,
        with_groundtruth: bool,
    ) -> List[SequenceBundle]:
        layout = DatasetLayout(
            detections=manifest.detections,
            flows=manifest.flows,
            groundtruth=manifest.groundtruth,
        )
        dataset = DatasetAdapter(layout)

        def load(sequence: str) -> SequenceBundle:
            return dataset.load_bundle(
                sequence,
                vocabulary,
                manifest.score_threshold,
                with_flows=with_flows,
                with_groundtruth=with_groundtruth,
            )

        return self._map(load, layout.sequences(manifest.sequences))

    # -- handlers ------------------------------------------------------------

    def _handle_correct(self, request: CoreRequest) -> CoreResponse:
        """Handle correct command"""
        manifest = self._manifest(request)
        config = manifest.temporal
        needs_flows = config.window_f > 0
        manifest.check_inputs(flows=needs_flows)
        vocabulary = self.vocabularies.load(manifest.vocabulary)
        bundles = self._load_bundles(manifest, vocabulary, needs_flows, False)

        def correct(bundle: SequenceBundle) -> List[FrameDetections]:
            try:
                frames = correct_sequence(bundle.frames, bundle.flows, config)
            except SurgtcError as exc:
                raise exc.with_context(path=manifest.detections / f"{bundle.name}.json")
            relabelled = sum(
                a.class_id != b.class_id
                for before, after in zip(bundle.frames, frames)
                for a, b in zip(before, after)
            )
            logger.info(
                "Sequence corrected",
                sequence=bundle.name,
                frames=len(frames),
                candidates=sum(len(frame) for frame in frames),
                relabelled=relabelled,
            )
            return frames

        corrected = self._map(correct, bundles)
        writer = DatasetAdapter(DatasetLayout(detections=manifest.output))
        written = [
            str(writer.write_frames(bundle.name, frames, bundle.frame_size))
            for bundle, frames in zip(bundles, corrected)
        ]
        return CoreResponse(
            type=ResponseType.SUCCESS,
            status="corrected",
            message=f"{len(written)} sequence(s) corrected into {manifest.output}",
            data={"files": written, "config": config.model_dump(mode="json")},
        )

    def _handle_evaluate(self, request: CoreRequest) -> CoreResponse:
        """Handle evaluate command"""
        manifest = self._manifest(request)
        manifest.check_inputs(groundtruth=True)
        vocabulary = self.vocabularies.load(manifest.vocabulary)
        bundles = self._load_bundles(manifest, vocabulary, False, True)

        layout = DatasetLayout(detections=manifest.detections, groundtruth=manifest.groundtruth)
        pairs = []
        for bundle in bundles:
            for (predicted, truth), frame in zip(label_pairs(bundle, bundle.frames), bundle.frames):
                if predicted.shape != truth.shape:
                    raise ShapeError(
                        f"label map {truth.shape} for frames of size {predicted.shape}",
                        path=layout.label_map_file(bundle.name, frame.frame_index),
                        frame=frame.frame_index,
                    )
                pairs.append((predicted, truth))
        report = evaluate(pairs, vocabulary)
        table = write_report(report, vocabulary, manifest.output)
        return CoreResponse(
            type=ResponseType.SUCCESS,
            status="evaluated",
            message=f"{report.frames_evaluated} frame(s) evaluated",
            data={"report": report_to_dict(report, vocabulary), "table": table},
        )

    def _handle_ablate(self, request: CoreRequest) -> CoreResponse:
        """Handle ablate command"""
        manifest = self._manifest(request)
        params = request.parameters
        try:
            grid = AblationGrid(
                thresholds=tuple(float(u) for u in params.get("grid_thresholds") or (0.0, 0.5)),
                frames=tuple(int(f) for f in params.get("grid_frames") or (3, 5, 7)),
                strategies=tuple(
                    AssignmentStrategy(s)
                    for s in params.get("grid_assignments") or ("max", "weighted_mode")
                ),
            )
        except ValueError as exc:
            raise ConfigError(f"invalid ablation grid: {exc}")
        manifest.check_inputs(flows=True, groundtruth=True)
        vocabulary = self.vocabularies.load(manifest.vocabulary)
        bundles = self._load_bundles(manifest, vocabulary, True, True)

        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            table = ablate(bundles, grid, vocabulary, executor=pool)
        text = write_ablation(table, vocabulary, manifest.output)
        return CoreResponse(
            type=ResponseType.SUCCESS,
            status="ablated",
            message=f"{len(table.rows)} configuration(s) evaluated",
            data={"ablation": ablation_to_dict(table, vocabulary), "table": text},
        )

    def _handle_simulate(self, request: CoreRequest) -> CoreResponse:
        """Handle simulate command"""
        params = request.parameters
        plan: SimulationPlan = load_simulation_plan(params["config"])
        output = Path(params["output"])
        layout = DatasetLayout.under(output)
        dataset = DatasetAdapter(layout)

        def simulate(index: int):
            try:
                return generate(plan.sequence_config(index))
            except SurgtcError as exc:
                raise exc.with_context(path=params["config"])

        generated = self._map(simulate, list(range(plan.sequences)))
        names = []
        for index, sequence in enumerate(generated):
            name = plan.sequence_name(index)
            dataset.write_frames(name, sequence.predictions)
            dataset.write_instances(name, sequence.groundtruth)
            dataset.write_flows(name, sequence.predictions, sequence.flows)
            dataset.write_groundtruth(name, sequence.predictions, sequence.label_maps)
            names.append(name)

        for folder in (layout.detections, layout.flows, layout.groundtruth, layout.instances):
            if folder is not None:
                folder.mkdir(parents=True, exist_ok=True)
        vocabulary_lines = "".join(
            f"{class_id} class_{class_id}\n" for class_id in range(1, plan.synth.num_classes + 1)
        )
        (output / VOCABULARY_FILE).write_bytes(vocabulary_lines.encode("utf-8"))
        logger.info("Dataset simulated", sequences=len(names), output=str(output))
        return CoreResponse(
            type=ResponseType.SUCCESS,
            status="simulated",
            message=f"{len(names)} sequence(s) written to {output}",
            data={"sequences": names, "vocabulary": str(output / VOCABULARY_FILE)},
        )

    def _handle_verify_fixtures(self, request: CoreRequest) -> CoreResponse:
        """Handle verify_fixtures command"""
        root = Path(request.parameters.get("root") or "fixtures")
        if not root.is_dir():
            return CoreResponse(
                type=ResponseType.ERROR,
                status="missing_input",
                message=f"{root}: fixture folder not found",
            )
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            results = verify_fixtures(root, self.fixture_invoker, executor=pool)
        failed = [r for r in results if not r.passed]
        data = {
            "results": [
                {"name": r.name, "passed": r.passed, "message": r.message, "diff": r.diff}
                for r in results
            ]
        }
        if failed:
            return CoreResponse(
                type=ResponseType.ERROR,
                status="fixture_mismatch",
                message=f"{len(failed)}/{len(results)} fixture(s) failed: "
                + ", ".join(r.name for r in failed),
                data=data,
            )
        return CoreResponse(
            type=ResponseType.SUCCESS,
            status="fixtures_ok",
            message=f"{len(results)} fixture(s) passed",
            data=data,
        )
