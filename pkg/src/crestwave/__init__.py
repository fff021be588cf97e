"""Self-similar crest solutions of the 2D water-wave equations.

The crest is parameterised by its interior angle ``nu pi`` and the angle
``mu pi`` between its branches at infinity.  The package solves the
fixed-point system ``g = T[g]`` built from the Hilbert transform,
reconstructs the wave and checks its structural properties.
"""

from .errors import (
    ArchiveFormatError,
    CrestwaveError,
    InconsistentStateError,
    InversionError,
    NumericalFailureError,
    ParameterError,
    UnsupportedInputError,
    WindowError,
)
from .grid import Grid, GridFunction, build_grid, integrate_from_zero, log_derivative
from .hilbert import TailModel, check_H1_zero, hilbert_matrix, hilbert_transform
from .profile import (
    SelfSimilarWave,
    WaveProfile,
    asymptotic_exponents,
    check_pde_residual,
    check_pure_imaginary_identity,
    evaluate_spacetime,
    reconstruct_profile,
    similarity_law_s,
    solve_on_window_grid,
    surface_tension_diagnostic,
    velocity_asymptotics,
    window_grid,
)
from .solver import (
    SolveReport,
    SolverOptions,
    check_xgprime_bounded,
    dilation_drift,
    project_X1,
    solve_critical,
    solve_fixed_point,
)
from .system import Parameters, SystemState, apply_T, crest_scale, dilate
from .verification import (
    VerificationReport,
    check_apriori_estimate,
    check_lemma_bounds,
    check_lipschitz_T,
    check_X1_membership,
    verify_state,
)

__version__ = "0.1.0"
