"""Exception types. Each carries a short machine-readable ``code`` used by the CLI."""


class IrsCoverError(Exception):
    code = "error"
    exit_status = 1


class DegenerateGeometryError(IrsCoverError, ValueError):
    code = "degenerate-geometry"
    exit_status = 3


class InfeasiblePlacementError(IrsCoverError, ValueError):
    code = "infeasible-placement"
    exit_status = 4


class SearchSpaceTooLargeError(IrsCoverError, ValueError):
    code = "search-space-too-large"
    exit_status = 5


class DegenerateChannelError(IrsCoverError, ValueError):
    code = "degenerate-channel"
    exit_status = 6


class DegeneratePartitionError(IrsCoverError, ValueError):
    code = "degenerate-partition"
    exit_status = 7


class ContractViolation(IrsCoverError, ValueError):
    code = "contract-violation"
    exit_status = 8


class ScenarioError(IrsCoverError, ValueError):
    """Malformed or invalid scenario file."""

    code = "scenario-parse"
    exit_status = 2

    def __init__(self, message, field=None, line=None):
        super().__init__(message)
        self.field = field
        self.line = line
