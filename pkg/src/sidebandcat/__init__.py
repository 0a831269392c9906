"""Qubit-oscillator sideband interference simulator and analysis toolkit.

A desk-scale numerical model of alternating red/blue sideband pulse
sequences on a trapped-ion-style qubit-oscillator system: preparation of
qubit-parity-locked superpositions under stable-but-unknown pulse
phases, one- and two-pulse interference verification, phenomenological
decoherence, phonon-distribution estimation from Rabi flops, and the
associated higher-level studies.
"""

__version__ = "0.1.0"

from .errors import (
    AliasingError,
    ConfigError,
    CutoffViolationError,
    DimensionMismatchError,
    InconsistentPopulationsError,
    InvalidCutoffError,
    InvalidPhasesError,
    NoTransitionError,
    NotParityLockedError,
    SimulationError,
    UndefinedConditionalError,
    UndefinedVisibilityError,
    UnresolvedFrequenciesError,
)
from .fockspace import (
    FockDistribution,
    JointDensity,
    JointState,
    fock_distribution,
    new_ground,
    overlap,
    parity_expectation,
    reduce_oscillator,
)
from .sideband import (
    BSB,
    CARRIER,
    RSB,
    PhaseRotation,
    PulseSpec,
    RabiModel,
    apply_phase_rotation,
    apply_pulse,
    apply_pulse_density,
    pulse_matrix,
    rabi_frequency,
    verify_commutation_identity,
)
from .preparation import (
    HALF_TRANSFER_AREA,
    ScenarioSpec,
    SequenceSpec,
    build_half_transfer_sequence,
    build_sequence,
    growth_curve,
    prepare,
    sample_phase_vectors,
    sqrt_compensated_areas,
)
from .noise import DecoherenceModel, apply_model, purity
from .interferometry import (
    BSB_VERIFICATION_AREA,
    RSB_VERIFICATION_AREA,
    CoherenceSpectrum,
    FringeSurface,
    VerificationSpec,
    analytic_spectrum,
    averaged_metrics,
    fourier_spectrum,
    measure_pg,
    offdiag_contribution,
    overlap_metrics,
    povm_ground,
    predicted_max,
    scan_fringe,
)
from .estimation import (
    FlopModel,
    PhononFit,
    RabiFlopRecord,
    WEstimate,
    conditional_distribution,
    estimate_w,
    fit_phonon_distribution,
    fit_w_ledger,
    simulate_rabi_flop,
)
from .scenarios import (
    CatSpec,
    RabiGateSpec,
    apply_rabi_gate,
    cat_metrics,
    instability_sweep,
    optimize_detection_areas,
)
