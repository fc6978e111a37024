"""Root-of-unity deformation parameters and signed log-domain arithmetic.

Everything in this package is built on the deformation q = exp(2*pi*i/(S+1)),
which replaces the integer n by the bracket value [n] = sin(n*phi)/sin(phi).
Bracket factorials outgrow double precision long before S gets interesting
(|[S]'s factorial| ~ ((S+1)/4pi)^(S+1)), so magnitudes are carried as
natural-log values with an explicit sign.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

TWO_PI = 2.0 * math.pi

BRANCH_PRINCIPAL = "principal"
BRANCH_MODULUS = "modulus"
BRANCHES = (BRANCH_PRINCIPAL, BRANCH_MODULUS)

# A signed log-domain sum is reported as cancelled when its magnitude drops
# below this fraction of the largest contributing term.
CANCELLATION_RATIO = 1e-10


class CancellationWarning(RuntimeWarning):
    """A signed log-domain sum lost essentially all of its significant digits."""


def validate_branch(branch: str) -> str:
    if branch not in BRANCHES:
        raise ValueError(f"branch must be one of {BRANCHES}, got {branch!r}")
    return branch


@dataclass(frozen=True)
class DeformationParams:
    """Truncation S (space dimension S+1) and the derived root-of-unity data.

    S must be an even integer >= 2.  For odd S the bracket [(S+1)/2] vanishes
    in the interior of the ladder, which truncates every construction before
    it reaches |S>; even S guarantees [n] != 0 for 1 <= n <= S and [S+1] = 0.
    """

    S: int
    phi: float = field(init=False)
    q: complex = field(init=False)

    def __post_init__(self):
        if isinstance(self.S, bool) or not isinstance(self.S, (int, np.integer)):
            raise TypeError(f"S must be an integer, got {type(self.S).__name__}")
        if self.S < 2 or self.S % 2 != 0:
            raise ValueError(
                f"S must be an even integer >= 2 (odd S places a bracket zero "
                f"inside the ladder); got {self.S}"
            )
        object.__setattr__(self, "S", int(self.S))
        object.__setattr__(self, "phi", TWO_PI / (self.S + 1))
        object.__setattr__(self, "q", cmath.exp(1j * self.phi))

    @property
    def dim(self) -> int:
        return self.S + 1


@dataclass(frozen=True)
class SignedLogValue:
    """A real number stored as (sign, log|x|).

    Survives magnitudes far outside the double range; multiplication adds
    log magnitudes and multiplies signs, and zero absorbs.  ``log_mag`` is
    meaningless (kept at 0.0) when ``sign`` is 0.
    """

    sign: int
    log_mag: float

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign}")
        if self.sign == 0:
            object.__setattr__(self, "log_mag", 0.0)

    @classmethod
    def from_real(cls, x: float) -> "SignedLogValue":
        if x == 0.0:
            return cls(0, 0.0)
        if math.isnan(x) or math.isinf(x):
            raise ValueError(f"cannot represent {x!r} in signed log form")
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    def to_real(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_mag)

    def __mul__(self, other: "SignedLogValue") -> "SignedLogValue":
        if self.sign == 0 or other.sign == 0:
            return SignedLogValue(0, 0.0)
        return SignedLogValue(self.sign * other.sign, self.log_mag + other.log_mag)

    def __neg__(self) -> "SignedLogValue":
        return SignedLogValue(-self.sign, self.log_mag)


def log_sum_exp(values) -> SignedLogValue:
    """Sum of SignedLogValues, computed by factoring out the max magnitude.

    The scaled terms are accumulated with math.fsum, so the only error left
    is the representation error of the terms themselves.  When the result is
    more than ten orders of magnitude below the largest term the surviving
    digits are mostly roundoff; that case is flagged with a
    CancellationWarning (an exact zero comes back with sign 0).
    """
    vals = list(values)
    if not vals:
        raise ValueError("log_sum_exp needs at least one value")
    live = [v for v in vals if v.sign != 0]
    if not live:
        return SignedLogValue(0, 0.0)
    top = max(v.log_mag for v in live)
    acc = math.fsum(v.sign * math.exp(v.log_mag - top) for v in live)
    if abs(acc) < CANCELLATION_RATIO:
        warnings.warn(
            f"cancellation in signed log-domain sum: result is {abs(acc):.3e} "
            f"of the largest term",
            CancellationWarning,
            stacklevel=2,
        )
    if acc == 0.0:
        return SignedLogValue(0, 0.0)
    return SignedLogValue(1 if acc > 0.0 else -1, top + math.log(abs(acc)))


def q_number(n: int, params: DeformationParams) -> float:
    """Bracket value [n] = sin(n*phi)/sin(phi).

    The argument is reduced mod S+1 first, which makes the period exact and
    returns an exact 0.0 whenever n is a multiple of S+1 (the truncation
    condition [S+1] = 0).
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    m = n % (params.S + 1)
    if m == 0:
        return 0.0
    return math.sin(m * params.phi) / math.sin(params.phi)


@lru_cache(maxsize=128)
def _qfact_tables(params: DeformationParams):
    """(signs, log magnitudes) of [n]! for n = 0..S, as read-only arrays.

    sign([n]!) = (-1)^max(0, n - S/2): the brackets turn negative exactly for
    n > S/2.
    """
    S = params.S
    j = np.arange(1, S + 1)
    vals = np.sin(j * params.phi) / math.sin(params.phi)
    logs = np.concatenate(([0.0], np.cumsum(np.log(np.abs(vals)))))
    neg = np.concatenate(([0], np.cumsum(vals < 0.0)))
    signs = np.where(neg % 2 == 1, -1, 1).astype(np.int64)
    logs.setflags(write=False)
    signs.setflags(write=False)
    return signs, logs


def q_factorial(n: int, params: DeformationParams) -> SignedLogValue:
    """[n]! = [1][2]...[n] as a SignedLogValue.

    Conventions: [0]! = 1 (empty product) and [S+1]! = [S]! (the zero factor
    [S+1] is dropped).  Beyond S+1 the product is identically zero and of no
    use, so n > S+1 is a domain error.
    """
    if n < 0 or n > params.S + 1:
        raise ValueError(
            f"q_factorial is defined for 0 <= n <= S+1 = {params.S + 1}, got {n}"
        )
    m = min(n, params.S)
    signs, logs = _qfact_tables(params)
    return SignedLogValue(int(signs[m]), float(logs[m]))


def kronecker_comb(delta: int, params: DeformationParams) -> float:
    """Numerical sum of the S+1 unit phasors q^(l*delta), l = 0..S.

    Equals S+1 when delta = 0 mod S+1 and 0 otherwise, up to roundoff; this
    is the filter that collapses folded series onto a single residue.
    """
    l = np.arange(params.S + 1)
    total = np.exp(1j * params.phi * float(delta) * l).sum()
    return float(total.real)
