"""
Exception hierarchy for signed network analysis.
Each failure class maps to one command-line exit status.
"""


class NetworkAnalysisError(Exception):
    """Base class for every error raised by the analysis pipeline"""


class GraphValidationError(NetworkAnalysisError, ValueError):
    """A graph or node selection violates a structural requirement"""


class DuplicateNodeError(GraphValidationError):
    pass


class SelfLoopError(GraphValidationError):
    pass


class ZeroWeightError(GraphValidationError):
    pass


class UnknownEndpointError(GraphValidationError):
    pass


class DuplicateEdgeError(GraphValidationError):
    pass


class InputSetError(GraphValidationError):
    """Input/output node selection is empty, unknown or covers every node"""


class DimensionMismatchError(NetworkAnalysisError, ValueError):
    """Vector or matrix sizes do not agree with the graph"""


class DisconnectedGraphError(NetworkAnalysisError, ValueError):
    """Operation requires a connected graph"""


class GraphParseError(NetworkAnalysisError, ValueError):
    """Graph file could not be parsed"""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        location = ''
        if line is not None:
            location = f'line {line}'
            if column is not None:
                location += f', column {column}'
            location += ': '
        super().__init__(f'{location}{message}')


class SizeCapExceededError(NetworkAnalysisError):
    """A configured search or solve cap was exceeded"""


class NumericalError(NetworkAnalysisError):
    """Eigensolver, rank or integrator failure that cannot be resolved within tolerance"""


class SoundnessViolationError(NetworkAnalysisError):
    """A structural verdict contradicts the numerical test it is checked against"""


class UnreachableTargetError(NetworkAnalysisError, ValueError):
    """Steering target lies outside the reachable subspace"""
