"""Deformed (Tsallis) exponential matrix calculus and trace-inequality verification."""
from ._backend import BACKEND_NAME
from .deformed import (
    DensityMatrix,
    matrix_q_exp,
    matrix_q_log,
    q_exp,
    q_exp_derivative,
    q_log,
    q_log_derivative,
    tsallis_entropy,
    von_neumann_entropy,
)
from .frechet import frechet, trace_derivative_identity_check
from .functionals import (
    IsometryFamily,
    carlen_lieb,
    make_isometry_family,
    phi,
    phi_closed_form,
    phi_with_L,
)
from .inequalities import (
    InequalityVerdict,
    check_classical_gt,
    check_corollary6,
    check_differential_inequality,
    check_theorem1,
    decoupled_bound,
    decoupling_limit_check,
)
from .spectral import (
    PositiveDefiniteMatrix,
    RandomEnsembleSpec,
    SpectralDecomposition,
    SymmetricMatrix,
    apply_function,
    decompose,
    random_pd,
    trace,
)

__version__ = "0.1.0"
