import numpy as np
import pytest

from sparse_givens.givens import GivensModel, all_pairs


def make_random_model(rng, q=None, z=None, avoid_boundary=True):
    """Random valid sparse model: pair subset, continuous angles, ordered d.

    Rotator counts default to at most 2q: angle recovery from a float64
    eigenmatrix is intrinsically ill-conditioned for dense models whose
    near-boundary cosines compound, and sparse sets are the modelled regime.
    """
    if q is None:
        q = int(rng.integers(2, 21))
    m = q * (q - 1) // 2
    if z is None:
        z = int(rng.integers(0, min(m, 2 * q) + 1))
    pairs = all_pairs(q)
    chosen = sorted(rng.choice(m, size=z, replace=False))
    if avoid_boundary:
        # angles hugging 0 or pi/2 push structural nonzeros of R and K
        # toward the numeric zero threshold (their sine/cosine factors
        # compound multiplicatively); keep every factor >= 0.1
        angles = rng.uniform(0.1, 1.45, size=z) * rng.choice([-1.0, 1.0], size=z)
    else:
        angles = rng.uniform(-np.pi / 2, np.pi / 2, size=z)
        angles = np.where(np.abs(angles) < 1e-4, 0.2, angles)
    d = np.sort(rng.gamma(3.0, 1.0, size=q) + 1e-3)[::-1]
    while np.any(d[:-1] <= d[1:]):
        d = np.sort(rng.gamma(3.0, 1.0, size=q) + 1e-3)[::-1]
    return GivensModel(
        q=q,
        pairs=tuple(pairs[t] for t in chosen),
        angles=tuple(float(w) for w in angles),
        eigenvalues=tuple(d),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
