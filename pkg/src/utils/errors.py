from typing import Optional, Sequence


class SneakPathError(Exception):
    """Base class for every error raised by the toolkit"""

    exit_code = 1

    def to_record(self) -> dict:
        return {"error_code": self.exit_code, "error": type(self).__name__, "message": str(self)}


class ConfigError(SneakPathError):
    exit_code = 2


class DomainError(SneakPathError, ValueError):
    """Non-finite or out-of-domain numeric input"""

    exit_code = 2


class ConstructionError(SneakPathError, ValueError):
    """A pattern, spec or netlist could not be assembled"""

    exit_code = 2


class SolverError(SneakPathError):
    """Newton iteration did not converge, continuation included"""

    exit_code = 3

    def __init__(self, message: str, last_residual: float = float("nan"), iterations: int = 0):
        super().__init__(f"{message} (last residual {last_residual:.3e} A after {iterations} iterations)")
        self.last_residual = last_residual
        self.iterations = iterations


class StructuralError(SneakPathError):
    """The nodal system is singular, usually because part of the network floats"""

    exit_code = 3

    def __init__(self, message: str, floating_nodes: Optional[Sequence[str]] = None):
        self.floating_nodes = list(floating_nodes or [])
        if self.floating_nodes:
            shown = ", ".join(self.floating_nodes[:8])
            more = "" if len(self.floating_nodes) <= 8 else f" (+{len(self.floating_nodes) - 8} more)"
            message = f"{message}: floating subgraph [{shown}{more}]"
        super().__init__(message)


class BranchLookupError(SneakPathError, KeyError):
    exit_code = 3

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown branch"


class FitError(SneakPathError):
    exit_code = 3

    def __init__(self, message: str, parameter: Optional[str] = None):
        super().__init__(message if parameter is None else f"{message} (degenerate parameter: {parameter})")
        self.parameter = parameter


class ValidationGateError(SneakPathError):
    exit_code = 4
