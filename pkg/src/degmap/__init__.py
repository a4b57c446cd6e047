"""Battery degradation maps and convex piecewise affine wear costs.

Pipeline: cycle-test data or an analytic wear function -> degradation map
(side current over SoC band and current) -> system-size normalization ->
lower convex envelope as a max of planes -> evaluation, chemistry
benchmarks and an LP dispatch demo.
"""
from .errors import (
    DegenerateCoverageError,
    DegmapError,
    IllPosedSystemError,
    InfeasibleError,
    InvalidArgumentError,
    InvalidTrajectoryError,
    NotFoundError,
    SolverFailure,
    UnboundedError,
)
from .types import *  # noqa: F401,F403
from .patterns import *  # noqa: F401,F403
from .nnls import *  # noqa: F401,F403
from .analytic import *  # noqa: F401,F403
from .scaling import *  # noqa: F401,F403
from .hull import LowerHull, lower_hull
from .convexify import *  # noqa: F401,F403
from .reference import *  # noqa: F401,F403
from .simplex import LPResult, linprog
from .dispatch import *  # noqa: F401,F403
from .surface import PlotSurfaceDump, dump_surface

__version__ = "0.1.0"
