class BaseScatteringError(Exception):
    message: str


# input errors
class GridSpecError(BaseScatteringError):
    message: str = "Invalid grid specification"


class FieldSpaceError(BaseScatteringError):
    message: str = "Field space or grid mismatch"


class SpecialFunctionDomainError(BaseScatteringError):
    message: str = "Argument outside the special function domain"


class ResolventError(BaseScatteringError):
    message: str = "Invalid resolvent parameters"


class CutoffError(BaseScatteringError):
    message: str = "Invalid cutoff radii"


class DegenerateFrequencyError(BaseScatteringError):
    message: str = "Frequency lies on the degenerate line xi . theta0 = 0"


class IncidentDirectionError(BaseScatteringError):
    message: str = "Incident direction is not a unit vector"


class ParameterError(BaseScatteringError):
    message: str = "Numerical parameter out of range"


# numerical errors
class SolverConvergenceError(BaseScatteringError):
    message: str = "Lippmann-Schwinger solver did not converge"

    def __init__(self, msg: str, *, residual: float, iterations: int) -> None:
        super().__init__(msg)
        self.residual = residual
        self.iterations = iterations


# file errors
class DatasetFormatError(BaseScatteringError):
    message: str = "Malformed scattering dataset"


class DatasetCacheError(DatasetFormatError):
    message: str = "Cached scattering dataset is unreadable, remove it to regenerate"


class ReportError(BaseScatteringError):
    message: str = "Invalid experiment report"
