"""Exception types shared across the package."""


class SimulationError(Exception):
    """Base class for all errors raised by sidebandcat."""


class InvalidCutoffError(SimulationError):
    """Fock cutoff too small to represent the requested state."""


class CutoffViolationError(SimulationError):
    """Population leaked into the top Fock levels beyond tolerance."""


class DimensionMismatchError(SimulationError):
    """Operands live on spaces with different Fock cutoffs."""


class UndefinedConditionalError(SimulationError):
    """Conditioning on an outcome with (numerically) zero probability."""


class NoTransitionError(SimulationError):
    """Requested a sideband coupling that does not exist (l=-1 from n=0)."""


class InvalidPhasesError(SimulationError):
    """Phase vector length does not match the pulse count."""


class NotParityLockedError(SimulationError):
    """State lacks the qubit-parity structure required by the operation."""


class UndefinedVisibilityError(SimulationError):
    """Visibility requested where max + min vanishes."""


class AliasingError(SimulationError):
    """Phase grid too coarse for the requested harmonic extraction."""


class UnresolvedFrequenciesError(SimulationError):
    """Rabi-flop record cannot resolve the model frequencies."""


class InconsistentPopulationsError(SimulationError):
    """Fringe DC level is unreachable for any pulse area given the populations."""


class ConfigError(SimulationError):
    """Malformed run configuration or input file."""
