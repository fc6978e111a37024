"""Phase-eigenstate basis: transforms, distributions and phase statistics.

The orthonormal phase basis on the S+1 dimensional space is the set of
states |theta_m> with theta_m = theta0 + 2*pi*m/(S+1); expanding a number
state vector in it is a finite Fourier sum, so the basis change is unitary
and everything here reduces to careful bookkeeping of that transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qcore import TWO_PI, DeformationParams
from .states import StateVector

DEFAULT_THETA0 = -math.pi


@dataclass(frozen=True)
class PhaseDistribution:
    """Amplitudes and probabilities of a state in the phase-eigenstate basis.

    ``thetas`` is the strictly increasing grid theta0 + 2*pi*m/(S+1), m = 0..S,
    spanning [theta0, theta0 + 2*pi).
    """

    params: DeformationParams
    theta0: float
    thetas: np.ndarray
    amplitudes: np.ndarray
    probabilities: np.ndarray

    def __post_init__(self):
        dim = self.params.S + 1
        thetas = np.asarray(self.thetas, dtype=float)
        amp = np.asarray(self.amplitudes, dtype=complex)
        prob = np.asarray(self.probabilities, dtype=float)
        if thetas.shape != (dim,) or amp.shape != (dim,) or prob.shape != (dim,):
            raise ValueError(f"phase grid arrays must all have shape ({dim},)")
        if np.any(np.diff(thetas) <= 0.0):
            raise ValueError("theta grid must be strictly increasing")
        total = float(prob.sum())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"phase probabilities must sum to 1, got {total!r}")
        for arr in (thetas, amp, prob):
            arr.setflags(write=False)
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "amplitudes", amp)
        object.__setattr__(self, "probabilities", prob)


def theta_grid(params: DeformationParams, theta0: float = DEFAULT_THETA0) -> np.ndarray:
    return theta0 + TWO_PI * np.arange(params.S + 1) / (params.S + 1)


def phase_amplitudes(state: StateVector, theta0: float = DEFAULT_THETA0) -> PhaseDistribution:
    """Expand a number-basis state in the phase basis with reference theta0.

    C_m = (S+1)^(-1/2) sum_n exp(-i n theta_m) a_n, evaluated as the direct
    finite Fourier sum; unitarity of the basis change makes Parseval exact up
    to roundoff.
    """
    params = state.params
    dim = params.S + 1
    thetas = theta_grid(params, theta0)
    n = np.arange(dim)
    kernel = np.exp(-1j * np.outer(thetas, n))
    amp = kernel @ state.amplitudes / math.sqrt(dim)
    prob = np.abs(amp) ** 2
    prob /= prob.sum()
    return PhaseDistribution(params, float(theta0), thetas, amp, prob)


def number_amplitudes(dist: PhaseDistribution) -> StateVector:
    """Invert ``phase_amplitudes``: a_n = (S+1)^(-1/2) sum_m exp(i n theta_m) C_m."""
    dim = dist.params.S + 1
    n = np.arange(dim)
    kernel = np.exp(1j * np.outer(n, dist.thetas))
    amp = kernel @ dist.amplitudes / math.sqrt(dim)
    amp /= np.linalg.norm(amp)
    return StateVector(dist.params, amp)


def phase_expectation(dist: PhaseDistribution) -> float:
    """Expectation of the Hermitian phase operator: sum_m theta_m |C_m|^2."""
    return float(np.dot(dist.thetas, dist.probabilities))


def distribution_shift_check(state: StateVector, theta0_a: float,
                             theta0_b: float) -> float:
    """Residual of the translation invariance under an on-grid theta0 shift.

    When theta0_b - theta0_a = k * 2*pi/(S+1) for integer k, the two phase
    distributions are the same list of numbers cyclically relabeled by k;
    the returned value is the sup over the grid of the moduli mismatch under
    that relabeling (contract: below 1e-12).  Off-grid shifts do not have an
    exact relabeling and are rejected.
    """
    dim = state.params.S + 1
    step = TWO_PI / dim
    ratio = (theta0_b - theta0_a) / step
    k = round(ratio)
    if abs(ratio - k) > 1e-9:
        raise ValueError(
            f"theta0 shift of {ratio!r} grid steps is not an integer; "
            f"translation invariance is exact only on the theta grid"
        )
    mod_a = np.abs(phase_amplitudes(state, theta0_a).amplitudes)
    mod_b = np.abs(phase_amplitudes(state, theta0_b).amplitudes)
    # theta_b grid point m matches theta_a grid point (m + k) mod (S+1)
    return float(np.max(np.abs(mod_b - np.roll(mod_a, -k))))
