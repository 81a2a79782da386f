"""Gaussian likelihood machinery in the rotator-angle parametrization.

For zero-mean data with sum-of-squares matrix S, the log likelihood of a
model (R, A) is (n/2) sum(log a_k) - tr(R A R' S)/2.  As a function of one
angle, with the rotators before it folded into S and those after it folded
into A, the trace reduces to a quadratic form in (sin w, cos w) whose five
coefficients are cheap to extract; that is what makes per-angle Metropolis
sweeps and closed-form maximization fast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .givens import HALF_PI, GivensModel

__all__ = [
    "SumOfSquares",
    "ConditionalTerms",
    "DecorrelationState",
    "StateError",
    "full_log_likelihood",
    "init_decorrelation",
    "conditional_terms",
    "conditional_log_likelihood",
    "conditional_mle_last",
    "advance_state",
]


class StateError(RuntimeError):
    """Raised when a decorrelation state is advanced or read out of order."""


@dataclass(frozen=True)
class SumOfSquares:
    """Sum of squares S = sum_i x_i x_i' of centered data, with sample count."""

    S: np.ndarray
    n: int

    def __post_init__(self) -> None:
        S = np.asarray(self.S, dtype=np.float64)
        object.__setattr__(self, "S", S)
        q = S.shape[0]
        if S.shape != (q, q):
            raise ValueError("S must be square")
        scale = max(1.0, np.abs(S).max())
        if np.abs(S - S.T).max() > 1e-8 * scale:
            raise ValueError("S must be symmetric")
        if q and np.linalg.eigvalsh(S).min() < -1e-8 * scale:
            raise ValueError("S must be positive semidefinite")
        if self.n < 0:
            raise ValueError("n must be nonnegative")

    @property
    def q(self) -> int:
        return self.S.shape[0]

    @classmethod
    def from_data(cls, X: np.ndarray, center: bool = True) -> "SumOfSquares":
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2:
            raise ValueError("data must be a 2-d array (rows = observations)")
        if center:
            X = X - X.mean(axis=0, keepdims=True)
        return cls(S=X.T @ X, n=X.shape[0])


@dataclass(frozen=True)
class ConditionalTerms:
    """2x2 blocks driving the single-angle conditional likelihood.

    ``phi``: block of the decorrelated S; ``psi``: block of the conjugated
    inverse-eigenvalue diagonal; ``gamma``: the coupling block (the (i,j)
    block of A* S* minus psi @ phi).  ``coeffs`` are the five quadratic-form
    coefficients (qc2, qs2, qsc, lc, ls) of
    tr(O A* O' S*) = const + qc2 cos^2 + qs2 sin^2 + qsc sin cos + lc cos + ls sin.
    """

    phi: np.ndarray
    psi: np.ndarray
    gamma: np.ndarray
    coeffs: tuple[float, float, float, float, float]


class DecorrelationState:
    """Walks the rotator sequence carrying S* = R0' S R0 and A* = R1 A R1'.

    At cursor position k (0-based), S* has absorbed rotators 0..k-1 at their
    final angles and A* carries rotators k+1..z-1 at their stored angles, so
    the 2x2 terms at pair k give the exact conditional likelihood for angle k.
    After the final advance, S* equals R' S R, whose diagonal feeds the
    eigenvalue updates.
    """

    def __init__(self, S: np.ndarray, ii: np.ndarray, jj: np.ndarray,
                 angles: np.ndarray, a: np.ndarray):
        self.q = S.shape[0]
        self.ii = np.asarray(ii, dtype=np.int64)
        self.jj = np.asarray(jj, dtype=np.int64)
        self.angles = np.asarray(angles, dtype=np.float64)
        self.z = len(self.angles)
        self.cursor = 0
        self.S_star = np.array(S, dtype=np.float64, copy=True)
        A = np.zeros((self.q, self.q))
        A[np.diag_indices(self.q)] = a
        # fold rotators z-1 .. 1 into A so that A* excludes rotator 0
        for t in range(self.z - 1, 0, -1):
            _kernels.conjugate_pair(
                A, self.ii[t], self.jj[t],
                math.cos(self.angles[t]), -math.sin(self.angles[t]),
            )
        self.A_star = A

    def expected_pair(self) -> tuple[int, int]:
        if self.cursor >= self.z:
            raise StateError("state already advanced past the last rotator")
        return (int(self.ii[self.cursor]) + 1, int(self.jj[self.cursor]) + 1)


def init_decorrelation(ss: SumOfSquares, model: GivensModel) -> DecorrelationState:
    """Fresh state positioned at the first rotator of the model."""
    if ss.q != model.q:
        raise ValueError("dimension mismatch between data and model")
    ii, jj, ws = model.pair_arrays()
    a = 1.0 / np.asarray(model.eigenvalues)
    return DecorrelationState(ss.S, ii, jj, ws, a)


def advance_state(state: DecorrelationState, pair: tuple[int, int],
                  accepted_angle: float) -> DecorrelationState:
    """Fold the accepted angle of the cursor pair into S*, peel the next from A*."""
    if state.cursor >= state.z:
        raise StateError("cannot advance past the last rotator")
    if pair != state.expected_pair():
        raise StateError(
            f"out-of-order advance: expected pair {state.expected_pair()}, got {pair}"
        )
    k = state.cursor
    if accepted_angle != 0.0:
        _kernels.conjugate_pair(
            state.S_star, state.ii[k], state.jj[k],
            math.cos(accepted_angle), math.sin(accepted_angle),
        )
    state.angles[k] = accepted_angle
    state.cursor += 1
    if state.cursor < state.z:
        t = state.cursor
        _kernels.conjugate_pair(
            state.A_star, state.ii[t], state.jj[t],
            math.cos(state.angles[t]), math.sin(state.angles[t]),
        )
    return state


def conditional_terms(state: DecorrelationState,
                      pair: tuple[int, int]) -> ConditionalTerms:
    """Extract the 2x2 blocks for the pair at the state's cursor."""
    if pair != state.expected_pair():
        raise StateError(
            f"cursor is at pair {state.expected_pair()}, not {pair}"
        )
    i, j = pair[0] - 1, pair[1] - 1
    sel = [i, j]
    phi = state.S_star[np.ix_(sel, sel)].copy()
    psi = state.A_star[np.ix_(sel, sel)].copy()
    coeffs = _kernels.conditional_coeffs(state.S_star, state.A_star, i, j)
    N = np.empty((2, 2))
    N[0, 0] = state.A_star[i, :] @ state.S_star[:, i]
    N[0, 1] = state.A_star[i, :] @ state.S_star[:, j]
    N[1, 0] = state.A_star[j, :] @ state.S_star[:, i]
    N[1, 1] = state.A_star[j, :] @ state.S_star[:, j]
    gamma = N - psi @ phi
    return ConditionalTerms(phi=phi, psi=psi, gamma=gamma,
                            coeffs=tuple(float(v) for v in coeffs))


def quad_form_value(coeffs, w: float) -> float:
    """The trace quadratic form at angle w (constant part excluded)."""
    qc2, qs2, qsc, lc, ls = coeffs
    c, s = math.cos(w), math.sin(w)
    return qc2 * c * c + qs2 * s * s + qsc * s * c + lc * c + ls * s


def conditional_log_likelihood(w: float, terms: ConditionalTerms) -> float:
    """Single-angle conditional log likelihood up to an additive constant."""
    return -0.5 * quad_form_value(terms.coeffs, w)


def full_log_likelihood(model: GivensModel, ss: SumOfSquares) -> float:
    """(n/2) sum(log a_k) - tr(R A R' S)/2, up to a constant in the data."""
    if ss.q != model.q:
        raise ValueError("dimension mismatch between model and sum of squares")
    ii, jj, ws = model.pair_arrays()
    B = np.array(ss.S, copy=True)
    for t in range(len(ws)):
        _kernels.conjugate_pair(B, ii[t], jj[t], math.cos(ws[t]), math.sin(ws[t]))
    a = 1.0 / np.asarray(model.eigenvalues)
    return 0.5 * ss.n * float(np.sum(np.log(a))) - 0.5 * float(np.diag(B) @ a)


def conditional_mle_last(ssub: np.ndarray, n: int) -> tuple[float, np.ndarray]:
    """Closed-form angle maximizer for the right-most rotator position.

    ``ssub`` is the 2x2 block of the decorrelated sum of squares at (i, j).
    Returns the maximizing angle in (-pi/2, pi/2] (0 when the block is already
    decorrelated) and the two updated scaled inverse-eigenvalue estimates
    (n/a_i, n/a_j): the diagonal of the block after conjugation, i.e. the
    eigenvalues the rotation exposes.
    """
    s11, s12, s22 = float(ssub[0, 0]), float(ssub[0, 1]), float(ssub[1, 1])
    if s12 == 0.0:
        return 0.0, np.array([s11, s22])
    w = 0.5 * math.atan2(2.0 * s12, s22 - s11)
    if w == -HALF_PI:
        w = HALF_PI
    c, s = math.cos(w), math.sin(w)
    na_i = s11 * c * c + s22 * s * s - 2.0 * s12 * c * s
    na_j = s11 * s * s + s22 * c * c + 2.0 * s12 * c * s
    return w, np.array([na_i, na_j])
