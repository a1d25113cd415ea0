"""Matrix inversion one column at a time, by iterative least squares."""
from .engine import (
    InverseEstimate,
    Mode,
    estimate_inverse,
    estimate_inverse_scaled,
    estimate_inverse_sweep,
    estimate_pseudoinverse,
    estimate_pseudoinverse_sweep,
)
from .errors import BreakdownError, DivergenceError, InputError, NumericalError, SingularMatrixError
from .io import read_matrix, write_matrix
from .linalg import direct_inverse_oracle, direct_pseudoinverse_oracle
from .metrics import ErrorReport, check_corollary, check_prop1, error_report
from .solvers import (
    CGVariant,
    Method,
    SolverConfig,
    SolveOutcome,
    Termination,
    cg_least_squares,
    least_squares,
    sd_least_squares,
)
from .spectral import SpectralSummary, spectral_summary
from .straggler import Assignment, SimReport, StragglerModel, make_assignment, simulate, sweep_straggler_tolerance

__version__ = "0.1.0"
