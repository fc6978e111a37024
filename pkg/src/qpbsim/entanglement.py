"""Entanglement entropy of the two-mode squeezed families and derived scans.

Entropies are in bits throughout.  The analytic reference for the
untruncated squeezed vacuum is

    E(r) = cosh^2(r) log2 cosh^2(r) - sinh^2(r) log2 sinh^2(r),

and the ceiling in dimension S+1 is log2(S+1).  The two scans mirror the
standard experiments: the minimal even S putting a family's entropy within a
relative tolerance of the analytic value, and the saturation ratio
E/log2(S+1) at large squeezing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qcore import DeformationParams
from .states import squeezed_pb, squeezed_qpb

FAMILY_PB = "pb"
FAMILY_QPB = "qpb"
FAMILIES = (FAMILY_PB, FAMILY_QPB)

LABEL_SG = "sg_analytic"
CURVE_LABELS = (LABEL_SG, FAMILY_PB, FAMILY_QPB)

# probabilities below this are treated as exact zeros (0 log 0 = 0)
PROB_FLOOR = 1e-300

DEFAULT_S_CAP = 20000


class CapExceededError(RuntimeError):
    """No even truncation below the search cap met the requested tolerance."""


@dataclass(frozen=True)
class EntropyCurve:
    """Entropy-vs-r samples for one family (S is None for the analytic curve)."""

    label: str
    r_values: np.ndarray
    values: np.ndarray
    S: int | None = None

    def __post_init__(self):
        if self.label not in CURVE_LABELS:
            raise ValueError(f"label must be one of {CURVE_LABELS}, got {self.label!r}")
        r_values = np.asarray(self.r_values, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if r_values.shape != values.shape:
            raise ValueError("r grid and values must have matching shapes")
        if np.any(values < -1e-12):
            raise ValueError("entropies cannot be negative")
        if self.label != LABEL_SG:
            if self.S is None:
                raise ValueError("truncated curves need S")
            if np.any(values > math.log2(self.S + 1) + 1e-9):
                raise ValueError("entropy exceeds the log2(S+1) ceiling")
        for arr in (r_values, values):
            arr.setflags(write=False)
        object.__setattr__(self, "r_values", r_values)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class SRequiredResult:
    """Minimal even truncations meeting a relative entropy tolerance at one r."""

    r: float
    S_pb: int
    S_qpb: int
    tolerance: float

    def __post_init__(self):
        if self.S_pb % 2 or self.S_qpb % 2:
            raise ValueError("required truncations must be even")
        if self.S_qpb < self.S_pb:
            raise ValueError(
                f"S_qpb = {self.S_qpb} < S_pb = {self.S_pb} at r = {self.r}; "
                f"the deformed family should never need less"
            )


def von_neumann_entropy(spectrum) -> float:
    """Entropy in bits of a normalized probability spectrum, with 0 log 0 = 0."""
    p = np.asarray(spectrum, dtype=float)
    if np.any(p < 0.0):
        raise ValueError("probabilities must be non-negative")
    total = float(p.sum())
    if abs(total - 1.0) > 1e-8:
        raise ValueError(f"spectrum must be normalized, sums to {total!r}")
    live = p[p > PROB_FLOOR]
    return float(-(live * np.log2(live)).sum())


def entropy_sg_analytic(r: float) -> float:
    """Closed-form entanglement entropy (bits) of the untruncated squeezed vacuum."""
    if r < 0.0:
        raise ValueError(f"r must be non-negative, got {r}")
    if r == 0.0:
        return 0.0
    c2 = math.cosh(r) ** 2
    s2 = math.sinh(r) ** 2
    return c2 * math.log2(c2) - s2 * math.log2(s2)


def e_max(params) -> float:
    """Entropy ceiling log2(S+1) in bits.

    Accepts either DeformationParams or a bare integer truncation (the value
    is defined for any dimension, not just the validated even ones).
    """
    s = params.S if isinstance(params, DeformationParams) else int(params)
    if s < 0:
        raise ValueError(f"truncation must be non-negative, got {s}")
    return math.log2(s + 1)


def _family_entropy(family: str, r: float, s: int) -> float:
    params = DeformationParams(s)
    if family == FAMILY_PB:
        return von_neumann_entropy(squeezed_pb(r, params).probabilities)
    if family == FAMILY_QPB:
        return von_neumann_entropy(squeezed_qpb(r, params).probabilities)
    raise ValueError(f"family must be one of {FAMILIES}, got {family!r}")


def saturation_ratio(r: float, params: DeformationParams, family: str) -> float:
    """E_family(r, S) / log2(S+1), the fraction of maximal entanglement reached."""
    if r == 0.0:
        return 0.0
    return _family_entropy(family, r, params.S) / e_max(params)


def s_required(r: float, tolerance: float, family: str,
               s_cap: int = DEFAULT_S_CAP) -> int:
    """Minimal even S with |E_family(r, S) - E_analytic(r)| <= tolerance (relative).

    Found by doubling until the tolerance is met, then bisecting over even S.
    The within-tolerance predicate is monotone in S for these families (the
    truncated entropies approach the analytic value from below without
    recrossing), which is what makes the bisection equal to a linear scan.
    Raises CapExceededError when even S = s_cap is still outside tolerance.
    """
    if r <= 0.0:
        raise ValueError(f"r must be positive, got {r}")
    if not 0.0 < tolerance < 1.0:
        raise ValueError(f"tolerance must be in (0, 1), got {tolerance}")
    if family not in FAMILIES:
        raise ValueError(f"family must be one of {FAMILIES}, got {family!r}")
    cap = int(s_cap) - int(s_cap) % 2
    if cap < 2:
        raise ValueError(f"s_cap must allow at least S = 2, got {s_cap}")
    target = entropy_sg_analytic(r)

    def within(s: int) -> bool:
        return abs(_family_entropy(family, r, s) - target) / target <= tolerance

    lo = 0  # exclusive: everything at or below lo (if > 0) failed
    hi = 2
    while not within(hi):
        lo = hi
        if hi >= cap:
            raise CapExceededError(
                f"{family} entropy at r = {r} misses {tolerance:.3%} even at "
                f"S = {cap}"
            )
        hi = min(hi * 2, cap)
    while hi - lo > 2:
        mid = (lo + hi) // 2
        mid -= mid % 2
        if mid == lo:
            mid += 2
        if within(mid):
            hi = mid
        else:
            lo = mid
    return hi


def s_required_scan(r: float, tolerance: float, family: str,
                    s_cap: int = DEFAULT_S_CAP) -> int:
    """Linear-scan reference for ``s_required``: first even S within tolerance."""
    if r <= 0.0:
        raise ValueError(f"r must be positive, got {r}")
    target = entropy_sg_analytic(r)
    for s in range(2, int(s_cap) + 1, 2):
        if abs(_family_entropy(family, r, s) - target) / target <= tolerance:
            return s
    raise CapExceededError(
        f"{family} entropy at r = {r} misses {tolerance:.3%} below S = {s_cap}"
    )


def entropy_curve(label: str, r_values, S: int | None = None) -> EntropyCurve:
    """Sample one family's entropy over an r grid (bits)."""
    r_arr = np.asarray(r_values, dtype=float)
    if label == LABEL_SG:
        vals = np.array([entropy_sg_analytic(r) for r in r_arr])
        return EntropyCurve(label, r_arr, vals, None)
    if S is None:
        raise ValueError("truncated curves need S")
    vals = np.array([0.0 if r == 0.0 else _family_entropy(label, float(r), S)
                     for r in r_arr])
    return EntropyCurve(label, r_arr, vals, S)
