"""Coherent and two-mode squeezed states in the truncated and deformed spaces.

Four families live here:

* ``coherent_pb``: the ordinary coherent state truncated at |S>.
* ``coherent_qpb``: amplitudes alpha^n/sqrt([n]!), with a branch toggle for
  the square roots of the negative bracket factorials.
* ``squeezed_pb``: the truncated two-mode squeezed vacuum (geometric weights).
* ``squeezed_qpb``: the deformed two-mode squeezed state, built from the
  folded exponential sub-series K(n) and the scale b = tanh(r)*|[S]!|^(1/(S+1)).

Every constructor works in the log domain and returns unit-norm output.
``k_series_direct``/``k_series_closed`` expose the two independent ways of
evaluating K(n); their agreement is the resummation identity the rest of the
squeezed construction rests on.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.special import gammaln, logsumexp

from .qcore import (
    BRANCH_MODULUS,
    BRANCH_PRINCIPAL,
    DeformationParams,
    SignedLogValue,
    _qfact_tables,
    validate_branch,
)

# b = tanh(r)*|[S]!|^(1/(S+1)) stays below ~(S+1)/(4*pi), so exp(b) is
# representable in doubles up to this bound.
B_MAX = 700.0

# Stop extending folded series once the next block is below this fraction of
# the accumulated sum.
SERIES_RTOL = 1e-18


class NonConvergenceWarning(RuntimeWarning):
    """A folded series was cut off while its terms were still significant."""


@dataclass(frozen=True)
class StateVector:
    """Normalized complex amplitudes over the number states |0>..|S> of one mode."""

    params: DeformationParams
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != (self.params.S + 1,):
            raise ValueError(
                f"expected {self.params.S + 1} amplitudes, got shape {amp.shape}"
            )
        norm_sq = float(np.sum(np.abs(amp) ** 2))
        if abs(norm_sq - 1.0) > 1e-12:
            raise ValueError(f"amplitudes must have unit norm, got |psi|^2 = {norm_sq!r}")
        amp = amp.copy()
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.amplitudes)


@dataclass(frozen=True)
class TwoModeDiagonalState:
    """Schmidt-diagonal two-mode state sum_n c_n |n,n>.

    The real coefficients c_n are kept in signed log form (they span far more
    orders of magnitude than doubles allow); ``probabilities`` holds the
    normalized Schmidt spectrum p_n = c_n^2.
    """

    params: DeformationParams
    coeff_sign: np.ndarray
    coeff_log: np.ndarray
    probabilities: np.ndarray

    def __post_init__(self):
        dim = self.params.S + 1
        sign = np.asarray(self.coeff_sign, dtype=np.int64)
        clog = np.asarray(self.coeff_log, dtype=float)
        prob = np.asarray(self.probabilities, dtype=float)
        for name, arr in (("coeff_sign", sign), ("coeff_log", clog), ("probabilities", prob)):
            if arr.shape != (dim,):
                raise ValueError(f"{name} must have shape ({dim},), got {arr.shape}")
        if np.any(prob < 0.0):
            raise ValueError("probabilities must be non-negative")
        total = float(prob.sum())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"probabilities must sum to 1, got {total!r}")
        for arr in (sign, clog, prob):
            arr.setflags(write=False)
        object.__setattr__(self, "coeff_sign", sign)
        object.__setattr__(self, "coeff_log", clog)
        object.__setattr__(self, "probabilities", prob)

    def coefficient(self, n: int) -> SignedLogValue:
        return SignedLogValue(int(self.coeff_sign[n]), float(self.coeff_log[n]))


@dataclass(frozen=True)
class SqueezeInput:
    """Squeezing parameter r and the derived series scale b = tanh(r)*|[S]!|^(1/(S+1))."""

    r: float
    b: float

    def __post_init__(self):
        if self.r < 0.0:
            raise ValueError(f"r must be non-negative, got {self.r}")
        if self.b < 0.0:
            raise ValueError(f"b must be non-negative, got {self.b}")


def _log_tanh(r: float) -> float:
    """log(tanh(r)) for r > 0, accurate even where tanh(r) rounds to 1.0."""
    if r <= 0.0:
        raise ValueError("r must be positive")
    two_r = 2.0 * r
    if two_r > 700.0:
        # tanh(r) = 1 - 2/(e^(2r)+1); the correction term itself underflows
        return -2.0 * math.exp(-two_r)
    return math.log1p(-2.0 / (math.exp(two_r) + 1.0))


def squeeze_scale(r: float, params: DeformationParams) -> SqueezeInput:
    """The (r, b) pair used by the deformed squeezed construction.

    The positive real root |[S]!|^(1/(S+1)) is used; [S]! itself is negative
    when S = 2 mod 4, so the literal fractional power is multivalued and the
    positive root is the one that keeps b (and hence K(n)) real.
    """
    if r < 0.0:
        raise ValueError(f"r must be non-negative, got {r}")
    if r == 0.0:
        return SqueezeInput(0.0, 0.0)
    _, logs = _qfact_tables(params)
    log_b = _log_tanh(r) + float(logs[params.S]) / (params.S + 1)
    return SqueezeInput(float(r), math.exp(log_b))


def _vacuum_amplitudes(dim: int) -> np.ndarray:
    amp = np.zeros(dim, dtype=complex)
    amp[0] = 1.0
    return amp


def _normalized_state(params: DeformationParams, log_w: np.ndarray,
                      phase: np.ndarray) -> StateVector:
    """Build a StateVector from log magnitudes and unit phases."""
    log_w = log_w - 0.5 * logsumexp(2.0 * log_w)
    amp = np.exp(log_w) * phase
    amp /= np.linalg.norm(amp)
    return StateVector(params, amp)


def coherent_pb(alpha: complex, params: DeformationParams) -> StateVector:
    """Truncated coherent state: amplitudes proportional to alpha^n/sqrt(n!).

    The normalization constant is chosen real positive, so the amplitude
    phases are exactly those of alpha^n.
    """
    alpha = complex(alpha)
    dim = params.S + 1
    if alpha == 0:
        return StateVector(params, _vacuum_amplitudes(dim))
    n = np.arange(dim)
    log_w = n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1.0)
    phase = np.exp(1j * n * cmath.phase(alpha))
    return _normalized_state(params, log_w, phase)


def coherent_qpb(alpha: complex, params: DeformationParams,
                 branch: str = BRANCH_MODULUS) -> StateVector:
    """Deformed coherent state: amplitudes proportional to alpha^n/sqrt([n]!).

    [n]! is negative for n > S/2, so its square root needs a branch choice:

    * ``"principal"``: 1/sqrt(-|x|) = -i/sqrt(|x|), so those amplitudes pick
      up a factor -i;
    * ``"modulus"`` (default): 1/sqrt(|x|), discarding the sign.

    The two branches produce identical moduli and differ only in phases.
    """
    validate_branch(branch)
    alpha = complex(alpha)
    dim = params.S + 1
    if alpha == 0:
        return StateVector(params, _vacuum_amplitudes(dim))
    signs, logs = _qfact_tables(params)
    n = np.arange(dim)
    log_w = n * math.log(abs(alpha)) - 0.5 * logs
    phase = np.exp(1j * n * cmath.phase(alpha))
    if branch == BRANCH_PRINCIPAL:
        phase = np.where(signs < 0, -1j * phase, phase)
    return _normalized_state(params, log_w, phase)


def _dropped_qfact_logs(params: DeformationParams, m_top: int) -> np.ndarray:
    """log of the bracket factorial with zero factors dropped, for m = 0..m_top.

    The factor at every multiple of S+1 is skipped (contributes nothing to
    the log product); all other factors are reduced mod S+1 before the sine
    is taken, keeping the periodicity exact.
    """
    dim = params.S + 1
    j = np.arange(1, m_top + 1)
    j_mod = j % dim
    factors = np.zeros(m_top, dtype=float)
    keep = j_mod != 0
    factors[keep] = (np.log(np.abs(np.sin(j_mod[keep] * params.phi)))
                     - math.log(math.sin(params.phi)))
    return np.concatenate(([0.0], np.cumsum(factors)))


def coherent_qpb_folded(alpha: complex, params: DeformationParams,
                        k_max: int = 8) -> StateVector:
    """Deformed coherent state built by folding the untruncated ladder.

    The coefficient of |n> collects alpha^m/sqrt(|[m]!|) over all
    m = n + k(S+1), k = 0..k_max, with the zero factors of the factorial
    dropped.  The collected prefactor is the same for every n, so up to
    normalization (and phases discarded with the magnitudes of the square
    roots) this reproduces ``coherent_qpb(..., "modulus")``; the agreement is
    a genuine check of the mod-(S+1) periodicity algebra.

    Emits NonConvergenceWarning when the k = k_max term still exceeds 1e-16
    of the k = 0 term, i.e. when the untruncated prefactor series itself has
    not converged (the normalized state is unaffected).
    """
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    alpha = complex(alpha)
    dim = params.S + 1
    if alpha == 0:
        return StateVector(params, _vacuum_amplitudes(dim))
    m_top = params.S + k_max * dim
    dropped = _dropped_qfact_logs(params, m_top)
    n = np.arange(dim)
    k = np.arange(k_max + 1)
    m = n[:, None] + dim * k[None, :]
    log_w = m * math.log(abs(alpha)) - 0.5 * dropped[m]
    # the per-k growth ratio is independent of n
    tail_ratio = float(np.max(log_w[:, -1] - log_w[:, 0]))
    if tail_ratio > math.log(1e-16):
        warnings.warn(
            f"fold series not converged after k_max={k_max}: last term is "
            f"exp({tail_ratio:.1f}) of the first",
            NonConvergenceWarning,
            stacklevel=2,
        )
    phase = np.exp(1j * m * cmath.phase(alpha))
    top = float(log_w.max())
    amp = (np.exp(log_w - top) * phase).sum(axis=1)
    amp /= np.linalg.norm(amp)
    return StateVector(params, amp)


def _normalized_diagonal(params: DeformationParams, signs: np.ndarray,
                         log_mags: np.ndarray) -> TwoModeDiagonalState:
    """Normalize signed-log coefficients so that sum of squares is one."""
    log_c = log_mags - 0.5 * logsumexp(2.0 * log_mags)
    prob = np.exp(2.0 * log_c)
    prob /= prob.sum()
    return TwoModeDiagonalState(params, signs, log_c, prob)


def _vacuum_diagonal(params: DeformationParams) -> TwoModeDiagonalState:
    dim = params.S + 1
    signs = np.zeros(dim, dtype=np.int64)
    signs[0] = 1
    log_c = np.full(dim, -np.inf)
    log_c[0] = 0.0
    prob = np.zeros(dim)
    prob[0] = 1.0
    return TwoModeDiagonalState(params, signs, log_c, prob)


def squeezed_pb(r: float, params: DeformationParams) -> TwoModeDiagonalState:
    """Truncated two-mode squeezed vacuum: c_n proportional to tanh^n(r).

    The Schmidt spectrum is the normalized geometric sequence
    p_n = |D|^2 tanh^(2n)(r) with |D|^2 = (1-tanh^2 r)/(1-tanh^(2S+2) r).
    """
    if r < 0.0:
        raise ValueError(f"r must be non-negative, got {r}")
    if r == 0.0:
        return _vacuum_diagonal(params)
    n = np.arange(params.S + 1)
    log_mags = n * _log_tanh(r)
    return _normalized_diagonal(params, np.ones(params.S + 1, dtype=np.int64), log_mags)


def _check_k_series_args(n: int, b: float, params: DeformationParams):
    if not 0 <= n <= params.S:
        raise ValueError(f"n must be in [0, S] = [0, {params.S}], got {n}")
    if b < 0.0:
        raise ValueError(f"b must be non-negative, got {b}")
    if b > B_MAX:
        raise OverflowError(
            f"b = {b} exceeds {B_MAX}; exp(b) is not representable in doubles"
        )


def k_series_direct(n: int, b: float, params: DeformationParams) -> float:
    """K(n) = sum_k b^(n+k(S+1))/(n+k(S+1))! summed term by term.

    All terms are positive, so there is no cancellation; the sum is cut off
    once the next term is below 1e-18 of the accumulated total and the kept
    terms are combined with compensated summation.  This is the independent
    reference for ``k_series_closed``.
    """
    _check_k_series_args(n, b, params)
    if b == 0.0:
        return 1.0 if n == 0 else 0.0
    log_b = math.log(b)
    dim = params.S + 1
    terms = []
    k = 0
    while True:
        m = n + k * dim
        term = math.exp(m * log_b - gammaln(m + 1.0))
        terms.append(term)
        if term < SERIES_RTOL * math.fsum(terms):
            break
        k += 1
    return math.fsum(terms)


def _k_closed_digits(n: int, b: float, params: DeformationParams) -> int:
    """Working digits needed so that the e^b-sized terms of the closed form
    cancel down to K(n) ~ b^n/n! with digits to spare."""
    log_k_floor = n * math.log(b) - float(gammaln(n + 1.0))
    span = b - min(0.0, log_k_floor)
    return 25 + int(span / math.log(10.0))


def k_series_closed(n: int, b: float, params: DeformationParams) -> float:
    """K(n) resummed over the roots of unity: (S+1)^-1 sum_l q^(-ln) e^(b q^l).

    The l-sum cancels from term scale e^b down to K(n), which can be dozens
    of orders smaller; doubles cannot survive that, so the sum is evaluated
    in adaptive extended precision and rounded once at the end.  The result
    is real by conjugate symmetry of the l-sum and non-negative.
    """
    _check_k_series_args(n, b, params)
    if b == 0.0:
        return 1.0 if n == 0 else 0.0
    dim = params.S + 1
    with mpmath.workdps(_k_closed_digits(n, b, params)):
        total = mpmath.mpf(0)
        for l in range(dim):
            root = mpmath.expjpi(mpmath.mpf(2 * l) / dim)
            total += (mpmath.exp(b * root) * mpmath.expjpi(mpmath.mpf(-2 * l * n) / dim)).real
        value = float(total / dim)
    return max(value, 0.0)


def _log_k_direct_all(params: DeformationParams, log_b: float) -> np.ndarray:
    """log K(n) for every n = 0..S at once, via the direct positive series."""
    dim = params.S + 1
    n = np.arange(dim)
    n_terms = 8 if params.S >= 64 else 48
    while True:
        k = np.arange(n_terms)
        m = n[:, None] + dim * k[None, :]
        log_terms = m * log_b - gammaln(m + 1.0)
        log_k = logsumexp(log_terms, axis=1)
        if float(np.max(log_terms[:, -1] - log_k)) < math.log(SERIES_RTOL):
            return log_k
        if n_terms > 4096:
            raise RuntimeError("folded exponential series failed to converge")
        n_terms *= 2


def squeezed_qpb(r: float, params: DeformationParams) -> TwoModeDiagonalState:
    """Deformed two-mode squeezed state, C(n) = [n]! |[S]!|^(-n/(S+1)) K(n).

    The whole pipeline runs in the signed log domain; K(n) is taken from the
    direct all-positive series, which stays accurate at every scale (the
    roots-of-unity closed form is algebraically identical but numerically
    noise-floored at e^b * eps, which would swamp the small-n coefficients
    once b is large).  sign C(n) = sign [n]! since K(n) > 0.
    """
    if r < 0.0:
        raise ValueError(f"r must be non-negative, got {r}")
    if r == 0.0:
        return _vacuum_diagonal(params)
    signs, logs = _qfact_tables(params)
    log_big_b = float(logs[params.S]) / (params.S + 1)
    log_b = _log_tanh(r) + log_big_b
    n = np.arange(params.S + 1)
    log_mags = logs - n * log_big_b + _log_k_direct_all(params, log_b)
    return _normalized_diagonal(params, signs.copy(), log_mags)


def squeezed_qpb_truncated(r: float, params: DeformationParams) -> TwoModeDiagonalState:
    """Deformed squeezed state by plain truncation: c_n prop. to [n]! tanh^n(r)/n!.

    The coefficients fall so fast with n that this is nearly indistinguishable
    from ``squeezed_qpb`` (the fold only adds k >= 1 echoes suppressed by
    roughly (e/4pi)^(S+1) each).
    """
    if r < 0.0:
        raise ValueError(f"r must be non-negative, got {r}")
    if r == 0.0:
        return _vacuum_diagonal(params)
    signs, logs = _qfact_tables(params)
    n = np.arange(params.S + 1)
    log_mags = logs + n * _log_tanh(r) - gammaln(n + 1.0)
    return _normalized_diagonal(params, signs.copy(), log_mags)


def state_fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>| of two single-mode states on the same truncation."""
    if a.params != b.params:
        raise ValueError("states live on different truncations")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)))


def diagonal_fidelity(a: TwoModeDiagonalState, b: TwoModeDiagonalState) -> float:
    """|sum_n c_n^a c_n^b| of two Schmidt-diagonal states, in the log domain."""
    if a.params != b.params:
        raise ValueError("states live on different truncations")
    joint = a.coeff_log + b.coeff_log
    live = (a.coeff_sign != 0) & (b.coeff_sign != 0)
    if not np.any(live):
        return 0.0
    top = float(joint[live].max())
    # normalized coefficients make top <= 0, so the rescaled sum cannot overflow
    acc = float(np.sum(a.coeff_sign[live] * b.coeff_sign[live]
                       * np.exp(joint[live] - top)))
    return abs(acc) * math.exp(top)
