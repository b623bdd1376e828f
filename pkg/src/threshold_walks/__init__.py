"""Continuous-time quantum and random walks on threshold network models."""

from .classical_walk import (
    ClassicalDistribution,
    classical_evolve,
    classical_spread_check,
    classical_time_average,
)
from .errors import (
    ConfigurationError,
    CoverageError,
    OracleSizeError,
    PreconditionError,
    SpectralConsistencyError,
)
from .graph_model import (
    BlockStructure,
    HiddenVariableConfig,
    ThresholdGraph,
    block_degrees,
    creation_sequence,
    edge_list,
    generate,
    is_connected,
)
from .quantum_walk import (
    AmplitudeVector,
    ProbabilityDistribution,
    evolve,
    localization_rates,
    probability,
    propagator_entry_binary,
    propagator_entry_general,
    time_averaged,
)
from .spectral import SpectralDecomposition, decompose, projector_apply

__version__ = "0.1.0"
