"""Exception types shared across the package.

Every error carries a stable machine-readable ``code`` so front ends can map
failures without parsing messages.
"""


class MgbaryError(Exception):
    code = "error"


class GraphValidationError(MgbaryError):
    code = "invalid-graph"


class MeasureValidationError(MgbaryError):
    code = "invalid-measure"


class NonMinimizingEdgeError(MgbaryError):
    code = "non-minimizing-edge"


class SupportCapError(MgbaryError):
    code = "support-cap-exceeded"


class SolverConsistencyError(MgbaryError):
    """Raised when a solver result fails its own consistency checks."""

    code = "internal-error"


class ParseError(MgbaryError):
    code = "parse-error"


class InputFileError(MgbaryError):
    code = "file-not-found"
