"""Linear-optical Bell-state analyzers: simulation, classification, and bound checks."""

__version__ = "0.1.0"

from .states import BellIndex, BilinearForm, DimensionError, Priors, bell_form, general_two_photon_form, norm_squared, w_matrix
from .network import (
    Beamsplitter,
    LinearNetwork,
    NotUnitaryError,
    PhaseShifter,
    RawUnitary,
    Swap,
    apply,
    compose,
    embed,
    identity_network,
    preset,
    random_haar,
    truncate_alpha,
)
from .detection import (
    ZERO_TOL,
    ConditionalState,
    DetectionOutcome,
    conditional_overlap,
    conditional_state,
    enumerate_outcomes,
    outcome_probability,
    s_vector,
    single_photon_probability,
    two_photon_probability,
)
from .discrimination import (
    DiscriminationReport,
    OutcomeClass,
    check_linear_dependence,
    check_two_photon_never_unambiguous,
    classify,
    max_identifiable_states,
    per_mode_bound,
)
from .optimizer import MeshParameters, OptimizationResult, mesh_to_network, optimize, smoothed_objective, smoothed_score, tap_photon_a, verify_bound
