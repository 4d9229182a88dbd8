"""
Core Protocol and Interface Adapters

Adapters translate between an interface's own inputs and the core
request/response protocol.
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, Optional

from .api import CommandType, CoreRequest, CoreResponse, ExitCode, InterfaceType, ResponseType


class CoreProtocol:
    """
    Utility methods for building properly formatted requests.
    """

    @staticmethod
    def create_request(
        command: CommandType,
        parameters: Optional[Dict[str, Any]] = None,
        interface_type: InterfaceType = InterfaceType.INTERNAL,
    ) -> CoreRequest:
        """Create a standardized core request"""
        return CoreRequest(
            command=command,
            parameters=parameters or {},
            interface_type=interface_type,
        )


class InterfaceAdapter(ABC):
    """
    Abstract base for adapters between an interface and the core API.
    """

    def __init__(self, interface_type: InterfaceType):
        self.interface_type = interface_type

    @abstractmethod
    def translate_to_core(self, command: str, options: Dict[str, Any]) -> CoreRequest:
        """Translate interface input to a core request"""
        pass

    @abstractmethod
    def translate_from_core(self, core_response: CoreResponse) -> str:
        """Translate a core response to interface output"""
        pass


class CLIAdapter(InterfaceAdapter):
    """CLI-specific adapter for translating command line options"""

    def __init__(self):
        super().__init__(InterfaceType.CLI)
        self.command_mappings = {
            "correct": CommandType.CORRECT,
            "evaluate": CommandType.EVALUATE,
            "simulate": CommandType.SIMULATE,
            "ablate": CommandType.ABLATE,
            "verify-fixtures": CommandType.VERIFY_FIXTURES,
        }

    def translate_to_core(self, command: str, options: Dict[str, Any]) -> CoreRequest:
        """
        Translate click options to a core request.

        Unset options (None, empty repeatable flags) are dropped so that the
        runner applies its own defaults.
        """
        if command not in self.command_mappings:
            raise KeyError(f"Unknown CLI command: {command}")
        parameters: Dict[str, Any] = {}
        for name, value in options.items():
            if value is None or value == ():
                continue
            parameters[name] = list(value) if isinstance(value, tuple) else value
        return CoreProtocol.create_request(
            command=self.command_mappings[command],
            parameters=parameters,
            interface_type=self.interface_type,
        )

    def translate_from_core(self, core_response: CoreResponse) -> str:
        """Translate core response to CLI output"""
        if core_response.type == ResponseType.ERROR:
            return f"Error: {core_response.message}"
        return core_response.message

    def exit_code(self, core_response: CoreResponse) -> int:
        """0 on success; data, format and fixture failures exit with 2"""
        if core_response.type == ResponseType.SUCCESS:
            return int(ExitCode.SUCCESS)
        return int(ExitCode.DATA)
