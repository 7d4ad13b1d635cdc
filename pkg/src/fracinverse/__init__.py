"""Matrix-free solvers for the regularized inverse source problem of
time-space fractional diffusion equations."""

from .errors import (
    DimensionError,
    DomainError,
    FracInverseError,
    ResourceError,
    SingularBlockError,
)
from .krylov import BlockTriangularPreconditioner, SolveReport, gmres, precond_apply, precond_build
from .numerics import FractionalOrders, L1Weights, TimeGrid, gamma_fn, l1_weights, time_grid
from .spectra import (
    DenseSystem,
    SpectralSummary,
    assemble_dense_system,
    condition_number_2,
    eigenvalues_dense,
    spectral_summary,
)
from .symbol import (
    SpaceGrid,
    SymbolCoefficients,
    ToeplitzOperator,
    assemble_dense_toeplitz,
    space_grid,
    symbol_coeffs,
    symbol_coeffs_1d,
    symbol_coeffs_md,
    toeplitz_matvec,
)
from .system import (
    CoefficientDiagonals,
    ProblemSpec,
    SystemOperator,
    add_noise,
    apply_system,
    build_rhs,
    build_system,
    extract_reconstruction,
    forward_solve,
    make_problem,
    relative_error,
    sample_fields,
)

__version__ = "0.1.0"
