"""Mode-dependent photon loss acting on photon-subtracted multimode Gaussian states."""

from .errors import ConfigError, CutoffLeakage, UnphysicalCovariance, VacuumSubtraction
from .phase_space import (
    GaussianState,
    commutator_form,
    is_symplectic_orthogonal,
    mean_photon_number,
    mode_projector,
    symplectic_eigenvalues,
    symplectic_form,
    vacuum_state,
    validate_covariance,
)
from .loss_channel import (
    DecayGenerator,
    LossChannel,
    apply_to_covariance,
    beamsplitter_transmittances,
    commutes_with_subtraction,
    decay_generator,
    decay_matrix,
    drifted_mode,
    propagate_quadrature,
)
from .subtraction import (
    PolyGaussianWigner,
    SubtractedState,
    WitnessResult,
    drift_subtraction_modes,
    lose_then_subtract,
    marginal,
    marginal_of_state,
    min_excess_kurtosis,
    negativity_witness,
    quadrature_moment,
    subtract_then_lose,
    subtraction_matrix,
    wigner_eval,
)
from .graph_states import (
    SCENARIOS,
    GraphSpec,
    cz_symplectic,
    graph_cov,
    initial_cov,
    square_graph_adjacency,
    square_graph_scenario,
)

__version__ = "0.1.0"
