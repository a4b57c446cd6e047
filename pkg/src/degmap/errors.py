"""Exception hierarchy shared by all degmap modules."""


class DegmapError(Exception):
    """Base class for domain errors raised by degmap."""


class InvalidArgumentError(DegmapError, ValueError):
    pass


class DegenerateCoverageError(InvalidArgumentError):
    """A depth of discharge covers no SoC band centre."""


class IllPosedSystemError(DegmapError):
    """The pattern matrix does not have full column rank."""

    def __init__(self, message, rank=None, columns=None):
        super().__init__(message)
        self.rank = rank
        self.columns = columns


class SolverFailure(DegmapError, RuntimeError):
    """An iterative solver hit its iteration cap."""

    def __init__(self, message, iterations=None, diagnostics=None):
        super().__init__(message)
        self.iterations = iterations
        self.diagnostics = diagnostics or {}


class NotFoundError(DegmapError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class InvalidTrajectoryError(DegmapError, ValueError):
    pass


class InfeasibleError(DegmapError):
    """LP has no feasible point.

    ``certificate`` holds the phase-one infeasibility and the indices of the
    constraint rows whose artificial variables stayed positive.
    """

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate or {}


class UnboundedError(DegmapError):
    """LP objective is unbounded below along ``ray``."""

    def __init__(self, message, ray=None):
        super().__init__(message)
        self.ray = ray
