"""Sparse Givens parametrization of orthogonal eigenmatrices.

A covariance matrix V is represented as V = R D R' where R is a product of
Givens rotators over index pairs (i, j) in fixed lexicographic order and D is
a strictly decreasing diagonal of eigenvalues.  Keeping only a subset of
rotators (the rest having angle exactly zero) yields sparse R, V and K = V^-1.

Vertex/pair indices in the public API are 1-based with i < j <= q; angles lie
in (-pi/2, pi/2].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels

HALF_PI = math.pi / 2.0

__all__ = [
    "HALF_PI",
    "GivensModel",
    "all_pairs",
    "pair_index",
    "canonical_angle",
    "rotator_matrix",
    "apply_rotation_left",
    "compose_eigenmatrix",
    "build_covariance",
    "build_precision",
    "decompose_eigenmatrix",
    "model_from_angles",
]


def all_pairs(q: int) -> list[tuple[int, int]]:
    """All m = q(q-1)/2 index pairs in lexicographic (product) order."""
    return [(i, j) for i in range(1, q) for j in range(i + 1, q + 1)]


def pair_index(i: int, j: int, q: int) -> int:
    """Position of 1-based pair (i, j) in the lexicographic enumeration."""
    _check_pair(i, j, q)
    i0 = i - 1
    return i0 * q - i0 * (i0 + 1) // 2 + (j - i - 1)


def canonical_angle(w: float) -> float:
    """Map an angle in [-pi/2, pi/2] to the canonical domain (-pi/2, pi/2]."""
    if w == -HALF_PI:
        return HALF_PI
    if not -HALF_PI < w <= HALF_PI:
        raise ValueError(f"angle {w!r} outside (-pi/2, pi/2]")
    return float(w)


def _check_pair(i: int, j: int, q: int) -> None:
    if not (1 <= i < j <= q):
        raise IndexError(f"invalid rotator pair ({i}, {j}) for dimension {q}")


@dataclass(frozen=True)
class GivensModel:
    """A sparse rotator set with angles, plus ordered eigenvalues.

    ``pairs`` holds the 1-based (i, j) index pairs of the non-identity
    rotators, sorted in the lexicographic product order; ``angles`` the
    matching nonzero angles; ``eigenvalues`` the strictly decreasing positive
    eigenvalues d_1 > ... > d_q.
    """

    q: int
    pairs: tuple[tuple[int, int], ...]
    angles: tuple[float, ...]
    eigenvalues: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.q < 1:
            raise ValueError("dimension must be >= 1")
        if len(self.pairs) != len(self.angles):
            raise ValueError("pairs and angles must have equal length")
        if len(self.eigenvalues) != self.q:
            raise ValueError("need exactly q eigenvalues")
        object.__setattr__(self, "pairs", tuple((int(i), int(j)) for i, j in self.pairs))
        object.__setattr__(
            self, "angles", tuple(canonical_angle(float(w)) for w in self.angles)
        )
        object.__setattr__(
            self, "eigenvalues", tuple(float(d) for d in self.eigenvalues)
        )
        prev = -1
        for (i, j) in self.pairs:
            _check_pair(i, j, self.q)
            idx = pair_index(i, j, self.q)
            if idx <= prev:
                raise ValueError("pairs must be unique and in lexicographic order")
            prev = idx
        for w in self.angles:
            if w == 0.0:
                raise ValueError("stored angles must be nonzero")
        for d in self.eigenvalues:
            if not d > 0.0:
                raise ValueError("eigenvalues must be positive")
        for a, b in zip(self.eigenvalues, self.eigenvalues[1:]):
            if not a > b:
                raise ValueError("eigenvalues must be strictly decreasing")

    @property
    def m(self) -> int:
        return self.q * (self.q - 1) // 2

    @property
    def z(self) -> int:
        return len(self.pairs)

    def pair_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """0-based row/column index arrays and the angle array."""
        ii = np.fromiter((i - 1 for i, _ in self.pairs), dtype=np.int64, count=self.z)
        jj = np.fromiter((j - 1 for _, j in self.pairs), dtype=np.int64, count=self.z)
        ws = np.asarray(self.angles, dtype=np.float64)
        return ii, jj, ws

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "rotators": [
                {"i": i, "j": j, "angle": w}
                for (i, j), w in zip(self.pairs, self.angles)
            ],
            "eigenvalues": list(self.eigenvalues),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "GivensModel":
        rot = doc["rotators"]
        return cls(
            q=int(doc["q"]),
            pairs=tuple((r["i"], r["j"]) for r in rot),
            angles=tuple(r["angle"] for r in rot),
            eigenvalues=tuple(doc["eigenvalues"]),
        )


def rotator_matrix(pair: tuple[int, int], angle: float, q: int) -> np.ndarray:
    """Dense q x q rotator over the 1-based pair (i, j)."""
    i, j = pair
    _check_pair(i, j, q)
    O = np.eye(q)
    c, s = math.cos(angle), math.sin(angle)
    O[i - 1, i - 1] = c
    O[j - 1, j - 1] = c
    O[i - 1, j - 1] = s
    O[j - 1, i - 1] = -s
    return O


def apply_rotation_left(
    M: np.ndarray,
    pair: tuple[int, int],
    angle: float,
    transpose: bool = False,
    inplace: bool = False,
) -> np.ndarray:
    """Replace rows i, j of M with the combinations of O(w) M (or O(w)' M).

    Never materialises the rotator; O(q) work per column.
    """
    i, j = pair
    _check_pair(i, j, M.shape[0])
    out = M if inplace else M.copy()
    s = math.sin(angle)
    _kernels.rotate_left(out, i - 1, j - 1, math.cos(angle), -s if transpose else s)
    return out


def compose_eigenmatrix(model: GivensModel) -> np.ndarray:
    """Orthogonal R as the ordered left-to-right product of the rotators."""
    ii, jj, ws = model.pair_arrays()
    return _kernels.compose_rotations(model.q, ii, jj, ws)


def build_covariance(model: GivensModel) -> np.ndarray:
    """V = R D R'."""
    return _conjugated_diagonal(model, np.asarray(model.eigenvalues))


def build_precision(model: GivensModel) -> np.ndarray:
    """K = R A R' with A the inverse eigenvalues."""
    return _conjugated_diagonal(model, 1.0 / np.asarray(model.eigenvalues))


def _conjugated_diagonal(model: GivensModel, diag: np.ndarray) -> np.ndarray:
    if np.any(~np.isfinite(diag)) or np.any(diag <= 0.0):
        raise ValueError("eigenvalues must be positive and finite")
    ii, jj, ws = model.pair_arrays()
    M = _kernels.precision_from_rotators(model.q, ii, jj, ws, diag)
    return 0.5 * (M + M.T)


def decompose_eigenmatrix(
    R: np.ndarray, snap_tol: float = 1e-12, orth_tol: float = 1e-8
) -> tuple[dict[tuple[int, int], float], np.ndarray]:
    """Recover the full angle map of an orthogonal matrix.

    Returns a dict over all m pairs in lexicographic order (recovered values
    below ``snap_tol`` are returned as exact zeros) together with the residual
    +/-1 sign diagonal: composing the nonzero angles and right-multiplying by
    the sign diagonal reproduces R.  The signs cancel in V = R D R', so the
    angle map alone reproduces any covariance built from R.
    """
    R = np.asarray(R, dtype=np.float64)
    q = R.shape[0]
    if R.shape != (q, q):
        raise ValueError("R must be square")
    err = np.abs(R.T @ R - np.eye(q)).max()
    if err > orth_tol:
        raise ValueError(f"input is not orthogonal (max |R'R - I| = {err:.3g})")
    flat, signs = _kernels.decompose_rotations(R, snap_tol)
    angles = {
        pair: float(w) for pair, w in zip(all_pairs(q), flat)
    }
    return angles, np.where(signs >= 0.0, 1.0, -1.0)


def model_from_angles(
    q: int,
    angles: dict[tuple[int, int], float],
    eigenvalues,
) -> GivensModel:
    """Build a model from a (possibly zero-filled) angle map."""
    pairs = []
    ws = []
    for pair in all_pairs(q):
        w = angles.get(pair, 0.0)
        if w != 0.0:
            pairs.append(pair)
            ws.append(w)
    return GivensModel(q=q, pairs=tuple(pairs), angles=tuple(ws),
                       eigenvalues=tuple(eigenvalues))
