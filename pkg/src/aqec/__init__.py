"""Correlated dephasing channels, approximate error correction metrics,
and code search on a few qubits."""

from . import _core

__version__ = "0.1.0"


def kernel_backend() -> str:
    """Which numerical kernel backend was selected at import."""
    return _core.BACKEND


from .channel import (  # noqa: E402
    ErrorProbabilities,
    KrausSet,
    LindbladGenerator,
    RateProfile,
    apply_channel,
    decay_factors,
    error_probabilities,
    integrate_lindblad,
    kraus_set,
    lindblad_generator,
)
from .codes import (  # noqa: E402
    Code,
    ProbeState,
    anti_aligned_code4,
    code_from_preset,
    probe_state,
    repetition_code,
    rotated_code,
    transform_code,
)
from .exceptions import ConfigError, ConsistencyError  # noqa: E402
from .linalg import (  # noqa: E402
    DimSplit,
    haar_unitary,
    hermitian_eigenvalues,
    kron,
    partial_trace,
    partial_transpose,
    trace_norm,
    unitary_from_generator,
)
from .metrics import (  # noqa: E402
    DeviationReport,
    closed_form_delta,
    deviation,
    initial_rate,
    kl_check,
    negativity,
    regime_inequality,
)
from .optimize import OptimizationResult, objective, optimize_code  # noqa: E402
from .recovery import RecoveryParams, optimal_q, recovery_error_set  # noqa: E402
