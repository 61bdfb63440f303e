"""Exception types shared across the package."""


class PathcutError(Exception):
    """Base class for all package errors."""


class GraphConstructionError(PathcutError):
    pass


class DuplicateEdgeError(GraphConstructionError):
    pass


class SelfLoopError(GraphConstructionError):
    pass


class NegativeValueError(GraphConstructionError):
    pass


class EmptyGraphError(PathcutError):
    pass


class InvalidParameterError(PathcutError):
    pass


class EdgeListParseError(PathcutError):
    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class NumericalInstabilityError(PathcutError):
    pass


class InfeasibleCoverError(PathcutError):
    """A constraint row has no cuttable element left."""


class UncoverablePathError(PathcutError):
    pass


class RoundingBudgetError(PathcutError):
    """Randomized rounding exceeded its trial cap without an acceptable cut."""


class IterationCapError(PathcutError):
    pass


class InfeasibleInstanceError(PathcutError):
    pass


class NoRouteThroughTargetError(PathcutError):
    """No simple route between the terminals passes through the target."""


class InfeasibleBudgetError(PathcutError):
    pass


class SolveTimeoutError(PathcutError):
    pass


class StuckError(PathcutError):
    """A baseline cannot make progress without touching protected edges."""


class PowerIterationError(PathcutError):
    pass


class TooLargeError(PathcutError):
    pass


class ExhaustedError(PathcutError):
    pass


class NoCandidateError(PathcutError):
    pass
