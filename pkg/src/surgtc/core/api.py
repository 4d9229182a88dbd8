"""
surgtc Core API - request/response protocol between interfaces and the runner

Every interface (today only the CLI) builds a CoreRequest, hands it to the
PipelineRunner and turns the CoreResponse back into its own output format.
"""

import uuid
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict

from surgtc.domain.entities.temporal_entities import TemporalConfig
from surgtc.domain.errors import MissingInputError
from surgtc.infrastructure.adapters.json_detection_adapter import DEFAULT_SCORE_THRESHOLD


class CommandType(Enum):
    """Commands supported by the runner"""
    CORRECT = "correct"
    EVALUATE = "evaluate"
    SIMULATE = "simulate"
    ABLATE = "ablate"
    VERIFY_FIXTURES = "verify_fixtures"


class ResponseType(Enum):
    """Standard response types from the runner"""
    SUCCESS = "success"
    ERROR = "error"


class InterfaceType(Enum):
    """Types of interfaces that can talk to the runner"""
    CLI = "cli"
    INTERNAL = "internal"


class ExitCode(IntEnum):
    """Process exit codes"""
    SUCCESS = 0
    USAGE = 1
    DATA = 2


@dataclass
class CoreRequest:
    """Standard request format for all runner commands"""
    command: CommandType
    parameters: Dict[str, Any] = field(default_factory=dict)
    interface_type: InterfaceType = InterfaceType.INTERNAL
    request_id: str = field(default_factory=lambda: str(uuid.uuid4()))


@dataclass
class CoreResponse:
    """Standard response format from the runner"""
    type: ResponseType
    status: str
    message: str
    data: Dict[str, Any] = field(default_factory=dict)
    request_id: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.type == ResponseType.SUCCESS


class RunManifest(BaseModel):
    """
    Everything a batch run reads and writes.

    Attributes:
        detections: folder holding one <sequence>.json per sequence
        flows: folder of per-sequence .flo files (correct, ablate)
        groundtruth: folder of per-sequence .pgm label maps (evaluate, ablate)
        vocabulary: bundled vocabulary name or path of a vocabulary file
        temporal: temporal consistency parameters
        score_threshold: candidates scoring at or below are dropped on read
        output: folder receiving the command outputs
        sequences: optional subset of sequence names
    """
    model_config = ConfigDict(frozen=True)

    detections: Path
    flows: Optional[Path] = None
    groundtruth: Optional[Path] = None
    vocabulary: str = "endovis2017"
    temporal: TemporalConfig = TemporalConfig()
    score_threshold: float = DEFAULT_SCORE_THRESHOLD
    output: Path
    sequences: Optional[List[str]] = None

    def check_inputs(self, *, flows: bool = False, groundtruth: bool = False) -> None:
        """
        Fail before any work if a referenced input folder is missing.

        Args:
            flows: the command needs the flow folder
            groundtruth: the command needs the groundtruth folder
        """
        required = [("detections", self.detections)]
        if flows:
            required.append(("flows", self.flows))
        if groundtruth:
            required.append(("groundtruth", self.groundtruth))
        for name, folder in required:
            if folder is None:
                raise MissingInputError(f"--{name} is required for this command")
            if not folder.is_dir():
                raise MissingInputError(f"{name} folder not found", path=folder)


class CoreAPI(ABC):
    """Abstract interface of the runner"""

    @abstractmethod
    def execute_command(self, request: CoreRequest) -> CoreResponse:
        """Execute a command and return response"""
        pass
