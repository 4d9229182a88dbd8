"""
surgtc Core Module - request protocol and the batch pipeline runner

All interfaces talk to the PipelineRunner through CoreRequest/CoreResponse.
"""

from .api import (
    CommandType,
    CoreAPI,
    CoreRequest,
    CoreResponse,
    ExitCode,
    InterfaceType,
    ResponseType,
    RunManifest,
)
from .log import configure_logging
from .protocol import CLIAdapter, CoreProtocol, InterfaceAdapter
from .runner import PipelineRunner, resolve_workers

__all__ = [
    "CoreAPI",
    "CoreRequest",
    "CoreResponse",
    "CommandType",
    "ExitCode",
    "ResponseType",
    "InterfaceType",
    "RunManifest",
    "configure_logging",
    "CoreProtocol",
    "InterfaceAdapter",
    "CLIAdapter",
    "PipelineRunner",
    "resolve_workers",
]
