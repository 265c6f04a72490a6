"""Correlations of a qubit shared with the two Rindler wedges of a field mode
whose occupation is truncated at N particles.

Closed-form partial-transpose spectra, entropies and mutual informations,
each checked against a brute-force dense-tensor oracle.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BracketError,
    CapacityError,
    ConfigError,
    ConvergenceError,
    DomainError,
    RindlerCorrError,
    VerificationError,
)
from .params import (  # noqa: E402
    AccelerationSpec,
    ModePoint,
    acceleration_from_squeezing,
    normalization_C,
    normalization_C2,
    squeezing_from_acceleration,
    weight_D0,
    weight_D1,
)
from .oracle import Party, build_tripartite_state, partial_trace, partial_transpose  # noqa: E402
from .measures import (  # noqa: E402
    CorrelationPoint,
    conservation_deviation,
    correlation_point,
    critical_r,
    crossing_point,
    entropy,
    negativity,
)
from .verify import verify_point  # noqa: E402

__all__ = [
    "AccelerationSpec",
    "BracketError",
    "CapacityError",
    "ConfigError",
    "ConvergenceError",
    "CorrelationPoint",
    "DomainError",
    "ModePoint",
    "Party",
    "RindlerCorrError",
    "VerificationError",
    "acceleration_from_squeezing",
    "build_tripartite_state",
    "conservation_deviation",
    "correlation_point",
    "critical_r",
    "crossing_point",
    "entropy",
    "negativity",
    "normalization_C",
    "normalization_C2",
    "partial_trace",
    "partial_transpose",
    "squeezing_from_acceleration",
    "verify_point",
    "weight_D0",
    "weight_D1",
]
