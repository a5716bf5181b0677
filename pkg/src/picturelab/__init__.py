"""Truncated Fock-space quantum optics toolkit.

Builds phase-randomized coherent and two-mode squeezed states, the
shared-phase multi-copy mixture, computes picture-invariant entanglement
diagnostics (negativity, diagonal separability certificates), and Monte
Carlo-simulates the random-phase displaced-parity Bell protocol.
"""

from .config import DEFAULT_TOL, Tolerances
from .errors import (
    ConfigurationError,
    DimensionError,
    PictureLabError,
    ResourceError,
    ShapeError,
    TruncationError,
    ValidationError,
)
from .fock import (
    Decomposition,
    DensityOp,
    Ket,
    ModeShape,
    assemble_density,
    expectation,
    number_ket,
    partial_trace,
    partial_transpose,
    trace_distance,
)
from .states import (
    PhaseAverage,
    SqueezeParams,
    coherent_ket,
    phase_randomized_coherent,
    rho_s,
    rho_t,
    split_coherent,
    tmsv_ket,
)
from .entanglement import (
    Bipartition,
    SeparabilityVerdict,
    alice_bob_cut,
    decomposition_equivalent,
    negativity,
    separable_certificate_diagonal,
    statistics_invariance_check,
)
from .bell import (
    BellResult,
    ChshSettings,
    GridSpec,
    chsh,
    correlator,
    displacement_matrix,
    joint_parity_probabilities,
    optimize_chsh,
    parity_matrix,
)
from .protocol import (
    ExperimentConfig,
    PhaseModel,
    SuccessCurve,
    phase_window,
    run_experiment,
    success_curve,
    success_probability,
)

__version__ = "0.1.0"
