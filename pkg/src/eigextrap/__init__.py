"""Dominant eigenpairs by power iteration with one-step extrapolation."""

from .errors import (
    BreakdownError,
    DegenerateSpectrumError,
    EigextrapError,
    ParseError,
    SingularMatrixError,
    UnsupportedFormatError,
    UsageError,
)
from .generators import (
    clustered_diag,
    linspace_diag,
    nonnormal_t,
    ones_init,
    random_init,
    wilkinson_w21,
)
from .linop import (
    CsrMatrix,
    DenseMatrix,
    LinearOperator,
    LuFactors,
    MatrixHandle,
    apply_csr,
    apply_dense,
    dot,
    lincomb,
    lu_factor,
    lu_solve,
    norm,
    shift_invert_operator,
)
from .mmio import load_matrix_market, read_matrix_market, read_trace_csv, write_trace_csv
from .oracle import (
    SpectrumResult,
    jacobi_symmetric_eigen,
    simulate_ideal_recurrence,
    spectral_ratio,
    triangular_dominant_pair,
)
from .solvers import (
    EigenResult,
    IterationTrace,
    SolverConfig,
    augmented_extrapolation,
    ideal_extrapolation,
    power_iterate,
    rayleigh_quotient,
    simple_extrapolation,
    solve,
)

__version__ = "0.1.0"
