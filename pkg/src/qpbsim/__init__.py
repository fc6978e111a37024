"""Coherent and two-mode squeezed states in truncated and deformed number spaces.

The deformation q = exp(2*pi*i/(S+1)) self-terminates the oscillator ladder
at |S>, giving a finite space that carries a Hermitian phase operator.  This
package builds the coherent and two-mode squeezed states of that space and
of its undeformed truncated counterpart, transforms them to the phase basis,
and measures their entanglement entropies; the ``qpbsim`` CLI replays the
standard numerical experiments as data files.
"""

from .qcore import (
    BRANCH_MODULUS,
    BRANCH_PRINCIPAL,
    CancellationWarning,
    DeformationParams,
    SignedLogValue,
    kronecker_comb,
    log_sum_exp,
    q_factorial,
    q_number,
)
from .states import (
    NonConvergenceWarning,
    SqueezeInput,
    StateVector,
    TwoModeDiagonalState,
    coherent_pb,
    coherent_qpb,
    coherent_qpb_folded,
    diagonal_fidelity,
    k_series_closed,
    k_series_direct,
    squeeze_scale,
    squeezed_pb,
    squeezed_qpb,
    squeezed_qpb_truncated,
    state_fidelity,
)
from .phase import (
    PhaseDistribution,
    distribution_shift_check,
    number_amplitudes,
    phase_amplitudes,
    phase_expectation,
    theta_grid,
)
from .operators import (
    OPERATOR_KINDS,
    AlgebraReport,
    OperatorMatrix,
    build_operator,
    verify_algebra,
)
from .entanglement import (
    FAMILY_PB,
    FAMILY_QPB,
    CapExceededError,
    EntropyCurve,
    SRequiredResult,
    e_max,
    entropy_curve,
    entropy_sg_analytic,
    s_required,
    s_required_scan,
    saturation_ratio,
    von_neumann_entropy,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraReport",
    "BRANCH_MODULUS",
    "BRANCH_PRINCIPAL",
    "CancellationWarning",
    "CapExceededError",
    "DeformationParams",
    "EntropyCurve",
    "FAMILY_PB",
    "FAMILY_QPB",
    "NonConvergenceWarning",
    "OPERATOR_KINDS",
    "OperatorMatrix",
    "PhaseDistribution",
    "SRequiredResult",
    "SignedLogValue",
    "SqueezeInput",
    "StateVector",
    "TwoModeDiagonalState",
    "build_operator",
    "coherent_pb",
    "coherent_qpb",
    "coherent_qpb_folded",
    "diagonal_fidelity",
    "distribution_shift_check",
    "e_max",
    "entropy_curve",
    "entropy_sg_analytic",
    "k_series_closed",
    "k_series_direct",
    "kronecker_comb",
    "log_sum_exp",
    "number_amplitudes",
    "phase_amplitudes",
    "phase_expectation",
    "q_factorial",
    "q_number",
    "s_required",
    "s_required_scan",
    "saturation_ratio",
    "squeeze_scale",
    "squeezed_pb",
    "squeezed_qpb",
    "squeezed_qpb_truncated",
    "state_fidelity",
    "theta_grid",
    "verify_algebra",
    "von_neumann_entropy",
]
