"""Dense matrix forms of the ladder, number and phase operators, with checks.

The point of this module is not the matrices themselves (they are small and
obvious) but the algebraic identities connecting them, which pin down the
conventions used everywhere else: the truncated commutator, the polar
decompositions through the unitary phase operator, and the deformed
commutation relation.  ``verify_algebra`` evaluates all of them as sup-norm
residuals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .qcore import (
    BRANCH_MODULUS,
    BRANCH_PRINCIPAL,
    DeformationParams,
    validate_branch,
)
from .phase import DEFAULT_THETA0, theta_grid

KIND_ANNIHILATION_PB = "annihilation_pb"
KIND_CREATION_PB = "creation_pb"
KIND_ANNIHILATION_Q = "annihilation_q"
KIND_CREATION_Q = "creation_q"
KIND_NUMBER = "number"
KIND_UNITARY_PHASE = "unitary_phase"
KIND_PHASE = "phase"

OPERATOR_KINDS = (
    KIND_ANNIHILATION_PB,
    KIND_CREATION_PB,
    KIND_ANNIHILATION_Q,
    KIND_CREATION_Q,
    KIND_NUMBER,
    KIND_UNITARY_PHASE,
    KIND_PHASE,
)


@dataclass(frozen=True)
class OperatorMatrix:
    """A dense (S+1)x(S+1) operator in the number basis.

    ``negative_brackets`` lists the n with [n] < 0 feeding the deformed
    ladder entries (empty for the undeformed kinds); under the modulus
    branch their sign information is discarded in the matrix itself.
    """

    params: DeformationParams
    kind: str
    entries: np.ndarray
    negative_brackets: tuple = ()

    def __post_init__(self):
        if self.kind not in OPERATOR_KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        mat = np.asarray(self.entries, dtype=complex)
        dim = self.params.S + 1
        if mat.shape != (dim, dim):
            raise ValueError(f"expected a ({dim},{dim}) matrix, got {mat.shape}")
        mat = mat.copy()
        mat.setflags(write=False)
        object.__setattr__(self, "entries", mat)


@dataclass(frozen=True)
class AlgebraReport:
    """Named sup-norm residuals of the operator identities, plus annotations."""

    params: DeformationParams
    theta0: float
    branch: str
    residuals: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    def max_residual(self) -> float:
        return max(self.residuals.values())

    def passes(self, tolerance: float = 1e-10) -> bool:
        return all(v < tolerance for v in self.residuals.values())


def _bracket_values(params: DeformationParams) -> np.ndarray:
    """[n] for n = 0..S, from the sine ratio with exact periodic reduction."""
    n = np.arange(params.S + 1)
    vals = np.sin(n * params.phi) / math.sin(params.phi)
    vals[0] = 0.0
    return vals


def _sqrt_branch(values: np.ndarray, branch: str) -> np.ndarray:
    """Square roots of possibly-negative reals under the chosen branch."""
    if branch == BRANCH_PRINCIPAL:
        return np.where(values < 0.0, 1j * np.sqrt(np.abs(values)),
                        np.sqrt(np.abs(values)) + 0j)
    return np.sqrt(np.abs(values)) + 0j


def _phase_eigenbasis(params: DeformationParams, theta0: float) -> np.ndarray:
    """Columns are the phase eigenstates <n|theta_m> = exp(i n theta_m)/sqrt(S+1)."""
    dim = params.S + 1
    thetas = theta_grid(params, theta0)
    n = np.arange(dim)
    return np.exp(1j * np.outer(n, thetas)) / math.sqrt(dim)


def build_operator(kind: str, params: DeformationParams,
                   theta0: float = DEFAULT_THETA0,
                   branch: str = BRANCH_MODULUS) -> OperatorMatrix:
    """Dense number-basis matrix of one of ``OPERATOR_KINDS``.

    ``theta0`` only enters the phase kinds; ``branch`` only the deformed
    ladder kinds, where sqrt([n]) follows the same toggle as the deformed
    coherent state (default modulus: sqrt(|[n]|) with the negative n recorded
    in ``negative_brackets``).
    """
    validate_branch(branch)
    dim = params.S + 1
    if kind == KIND_NUMBER:
        return OperatorMatrix(params, kind, np.diag(np.arange(dim)).astype(complex))
    if kind in (KIND_ANNIHILATION_PB, KIND_CREATION_PB):
        lower = np.diag(np.sqrt(np.arange(1, dim)), k=1).astype(complex)
        mat = lower if kind == KIND_ANNIHILATION_PB else lower.conj().T
        return OperatorMatrix(params, kind, mat)
    if kind in (KIND_ANNIHILATION_Q, KIND_CREATION_Q):
        brackets = _bracket_values(params)
        neg = tuple(int(n) for n in np.nonzero(brackets < 0.0)[0])
        roots = _sqrt_branch(brackets[1:], branch)
        # the raising operator is defined with the same root values sqrt([n]),
        # so it is the plain transpose of the lowering one; conjugating would
        # flip the sign of [n] recovered by squaring and break the deformed
        # commutation relation (the two coincide except under "principal")
        lower = np.diag(roots, k=1)
        mat = lower if kind == KIND_ANNIHILATION_Q else lower.T
        return OperatorMatrix(params, kind, mat, negative_brackets=neg)
    if kind in (KIND_UNITARY_PHASE, KIND_PHASE):
        basis = _phase_eigenbasis(params, theta0)
        thetas = theta_grid(params, theta0)
        eig = np.exp(1j * thetas) if kind == KIND_UNITARY_PHASE else thetas.astype(complex)
        mat = (basis * eig) @ basis.conj().T
        return OperatorMatrix(params, kind, mat)
    raise ValueError(f"unknown operator kind {kind!r}")


def _sup_norm(mat: np.ndarray) -> float:
    return float(np.max(np.abs(mat)))


def verify_algebra(params: DeformationParams, theta0: float = DEFAULT_THETA0,
                   branch: str = BRANCH_PRINCIPAL) -> AlgebraReport:
    """Residuals of the operator identities that fix this package's conventions.

    * ``commutator_pb``: [a, a^dag] - (1 - (S+1)|S><S|).  The coefficient
      S+1 is forced by the ladder matrices themselves (the eigenvalue on the
      top state is -S, and 1 - (S+1) = -S); the same identity is sometimes
      quoted with coefficient S, which leaves a residual of 1 on |S>.
    * ``polar_pb``: a - exp(i*phase_op) N^(1/2).
    * ``q_commutation_restricted``: a_q a_q^dag - q a_q^dag a_q - q^(-N) on
      the span of |0>..|S-1>.  Meaningful only under the principal branch;
      the modulus branch discards the bracket signs the identity needs, so
      the check is reported as not applicable there.
    * ``polar_q``: a_q - exp(i*phase_op) sqrt([N]) under the chosen branch.
    """
    validate_branch(branch)
    dim = params.S + 1
    residuals: dict = {}
    notes: dict = {}

    a = build_operator(KIND_ANNIHILATION_PB, params).entries
    a_dag = a.conj().T
    eye = np.eye(dim)
    top = np.zeros((dim, dim))
    top[-1, -1] = 1.0
    residuals["commutator_pb"] = _sup_norm(a @ a_dag - a_dag @ a - (eye - dim * top))
    notes["commutator_pb"] = (
        "coefficient S+1 on the top projector is forced: a^dag kills |S>, so "
        "the commutator eigenvalue there is -S = 1 - (S+1)"
    )

    unitary = build_operator(KIND_UNITARY_PHASE, params, theta0).entries
    sqrt_n = np.diag(np.sqrt(np.arange(dim))).astype(complex)
    residuals["polar_pb"] = _sup_norm(a - unitary @ sqrt_n)

    a_q = build_operator(KIND_ANNIHILATION_Q, params, branch=branch).entries
    a_q_dag = build_operator(KIND_CREATION_Q, params, branch=branch).entries
    if branch == BRANCH_PRINCIPAL:
        n = np.arange(dim)
        q_pow = np.diag(params.q ** (-n.astype(float)))
        lhs = a_q @ a_q_dag - params.q * (a_q_dag @ a_q)
        residuals["q_commutation_restricted"] = _sup_norm((lhs - q_pow)[:, : params.S])
    else:
        notes["q_commutation_restricted"] = (
            "not applicable: the modulus branch discards the bracket signs "
            "this identity depends on"
        )

    sqrt_nq = np.diag(_sqrt_branch(_bracket_values(params), branch))
    residuals["polar_q"] = _sup_norm(a_q - unitary @ sqrt_nq)

    return AlgebraReport(params, float(theta0), branch, residuals, notes)
