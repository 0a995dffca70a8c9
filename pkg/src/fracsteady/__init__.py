"""Positive steady states of a fractional logistic model with grazing and
constant-yield harvesting on an interval.

The integral fractional Laplacian with zero exterior data is discretized by
a symmetric, positive definite M-matrix; existence for ``lambda > lambda1`` is
realized constructively by monotone iteration between explicit sub- and
supersolutions.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DegenerateGapError,
    EigensolverError,
    FracSteadyError,
    InvalidArgumentError,
    InvalidDomainError,
    InvalidPairError,
    InvalidProfileError,
    NonConvergenceError,
    SingularOperatorError,
    TheoremHypothesisError,
    UnsupportedDimensionError,
)
from .fracop import (  # noqa: E402
    OperatorMatrix,
    QuadratureSpec,
    assemble_operator,
    gagliardo_seminorm,
    normalization_constant,
    solve_linear,
)
from .mesh import (  # noqa: E402
    Grid,
    GridFunction,
    Interval,
    boundary_distance,
    build_grid,
    harvesting_profile,
)
from .model import (  # noqa: E402
    ModelParams,
    NonexistenceReport,
    ResidualReport,
    ThresholdSet,
    build_subsolution,
    build_supersolution,
    check_subsupersolution,
    nonexistence_certificate,
    reaction,
    reaction_derivative,
    thresholds,
)
from .solver import SolveReport, monotone_solve, newton_solve, weak_residual  # noqa: E402
from .spectral import (  # noqa: E402
    BoundaryFit,
    EigenPair,
    boundary_fit,
    principal_eigenpair,
    rayleigh_quotient,
    torsion_closed_form,
    torsion_constant,
    torsion_function,
)
