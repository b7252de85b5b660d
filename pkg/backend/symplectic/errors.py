"""
Exception hierarchy. Input problems map to CLI exit status 2,
numerical singularities to exit status 3.
"""

from typing import Optional


class SymplecticError(Exception):
    """Base class for every error raised by the toolkit"""

    exit_code = 1


class InputError(SymplecticError, ValueError):
    """Malformed or out-of-domain input"""

    exit_code = 2


class SpecError(InputError):
    """Run spec could not be parsed or validated"""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class DimensionMismatchError(InputError):
    pass


class NonUnitaryFrameError(InputError):
    pass


class OffShellError(InputError):
    """Point violates the constraint equations beyond tolerance"""


class NonCoprimeError(InputError):
    pass


class NumericalSingularityError(SymplecticError, ArithmeticError):
    """A computation hit a numerical degeneracy and refuses to guess"""

    exit_code = 3


class SamplingTooCoarseError(NumericalSingularityError):
    pass


class DegenerateCrossingError(NumericalSingularityError):
    pass


class ResampleError(NumericalSingularityError):
    """Crossing sits on an endpoint sample"""


class SingularParameterError(NumericalSingularityError):
    pass


class ConstraintDegeneracyError(NumericalSingularityError):
    pass


class RankDeficiencyError(NumericalSingularityError):
    pass


class NoRealSolutionError(NumericalSingularityError):
    pass


class EnergyDriftError(NumericalSingularityError):
    pass


class FlowDivergenceError(NumericalSingularityError):
    """Non-finite state or gradient during evaluation or integration"""


class ConsistencyError(NumericalSingularityError):
    """Two independent evaluations of the same quantity disagree"""


class RegularPointNotFoundError(NumericalSingularityError):
    pass


class ProjectionError(ConsistencyError):
    """Projection onto the constraint set did not reach constraint_residual_max"""
