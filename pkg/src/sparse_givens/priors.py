"""Priors over rotator angles and eigenvalues, plus prior-predictive sparsity.

The angle prior is a three-part mixture: a point mass at pi/2 (harmless
row/column permutations), a conditional point mass at exactly 0 (rotator
excluded), and a continuous density on (-pi/2, pi/2) proportional to
exp(kappa * cos^2 w), which concentrates around 0 as kappa grows and tends to
the uniform as kappa -> 0.  Eigenvalues are ordered draws from an inverse
gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from . import _kernels
from .givens import HALF_PI, all_pairs

__all__ = [
    "AnglePrior",
    "EigenPrior",
    "normalizing_constant",
    "log_normalizing_constant",
    "angle_log_prior",
    "sample_angle",
    "sample_eigenvalues",
    "prior_sparsity_curve",
]

# rejection sampling against the uniform envelope degrades as exp(-kappa/2);
# switch to a tabulated inverse CDF beyond this concentration
_REJECTION_KAPPA_MAX = 20.0
_INV_CDF_BINS = 1 << 16


def log_normalizing_constant(kappa: float) -> float:
    """log c(kappa) with 1/c = integral of exp(kappa cos^2 w) over (-pi/2, pi/2).

    Evaluated by adaptive quadrature on the overflow-safe form
    exp(kappa) * integral exp(-kappa sin^2 w) dw.
    """
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    if kappa == 0.0:
        return -math.log(math.pi)
    val, err = quad(
        lambda w: math.exp(-kappa * math.sin(w) ** 2),
        -HALF_PI,
        HALF_PI,
        epsabs=0.0,
        epsrel=1e-13,
        limit=200,
    )
    if not val > 0 or err > 1e-10 * val:
        raise ArithmeticError("quadrature for the normalizing constant failed")
    return -(kappa + math.log(val))


def normalizing_constant(kappa: float) -> float:
    """c(kappa) such that c * integral exp(kappa cos^2 w) dw = 1."""
    return math.exp(log_normalizing_constant(kappa))


@dataclass(frozen=True)
class AnglePrior:
    """Three-part angle prior: masses at pi/2 and 0 plus the continuous part.

    ``beta_half`` is the marginal mass at pi/2; ``beta_zero`` the conditional
    mass at 0 given the angle is not pi/2; ``kappa`` the concentration of the
    continuous component.  The log normalizing constant is cached.
    """

    beta_half: float = 0.25
    beta_zero: float = 0.99
    kappa: float = 0.0
    log_c_kappa: float = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not 0.0 <= self.beta_half < 1.0:
            raise ValueError("beta_half must lie in [0, 1)")
        if not 0.0 <= self.beta_zero <= 1.0:
            raise ValueError("beta_zero must lie in [0, 1]")
        object.__setattr__(self, "log_c_kappa", log_normalizing_constant(self.kappa))

    # log prior mass of the three branches (zero-probability -> -inf)
    @property
    def log_mass_half(self) -> float:
        return math.log(self.beta_half) if self.beta_half > 0 else -math.inf

    @property
    def log_mass_zero(self) -> float:
        p = (1.0 - self.beta_half) * self.beta_zero
        return math.log(p) if p > 0 else -math.inf

    @property
    def log_weight_continuous(self) -> float:
        p = (1.0 - self.beta_half) * (1.0 - self.beta_zero)
        return math.log(p) if p > 0 else -math.inf

    def log_continuous_density(self, w) -> np.ndarray | float:
        """log p_c(w) = log c(kappa) + kappa cos^2(w) on the open interval."""
        return self.log_c_kappa + self.kappa * np.cos(w) ** 2


def angle_log_prior(w: float, prior: AnglePrior) -> float:
    """Log density/mass of the mixed angle measure at w in (-pi/2, pi/2]."""
    if not -HALF_PI < w <= HALF_PI:
        raise ValueError(f"angle {w!r} outside (-pi/2, pi/2]")
    if w == HALF_PI:
        return prior.log_mass_half
    if w == 0.0:
        return prior.log_mass_zero
    return prior.log_weight_continuous + float(prior.log_continuous_density(w))


def _sample_continuous(prior: AnglePrior, rng: np.random.Generator) -> float:
    """Draw from p_c by rejection (small kappa) or tabulated inverse CDF."""
    kappa = prior.kappa
    if kappa == 0.0:
        return float(rng.uniform(-HALF_PI, HALF_PI))
    if kappa <= _REJECTION_KAPPA_MAX:
        while True:
            w = float(rng.uniform(-HALF_PI, HALF_PI))
            if rng.random() < math.exp(-kappa * math.sin(w) ** 2):
                return w
    grid = np.linspace(-HALF_PI, HALF_PI, _INV_CDF_BINS + 1)
    dens = np.exp(kappa * (np.cos(grid) ** 2 - 1.0))
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]))])
    cdf /= cdf[-1]
    return float(np.interp(rng.random(), cdf, grid))


def sample_angle(prior: AnglePrior, rng: np.random.Generator) -> float:
    """One draw from the mixed three-part prior."""
    u = rng.random()
    if u < prior.beta_half:
        return HALF_PI
    if rng.random() < prior.beta_zero:
        return 0.0
    return _sample_continuous(prior, rng)


@dataclass(frozen=True)
class EigenPrior:
    """Inverse-gamma eigenvalue prior: 1/d ~ Gamma(eta1/2, rate eta2/2)."""

    eta1: float = 0.001
    eta2: float = 0.001

    def __post_init__(self) -> None:
        if self.eta1 <= 0 or self.eta2 <= 0:
            raise ValueError("eta1 and eta2 must be positive")


def sample_eigenvalues(
    prior: EigenPrior, q: int, rng: np.random.Generator
) -> np.ndarray:
    """q ordered inverse-gamma draws, strictly decreasing.

    The gamma is drawn through the small-shape identity
    Gamma(s) = Gamma(s+1) * U^(1/s), which stays finite in log space even for
    the near-zero shapes of vague priors; log values are then clamped to the
    double-representable range (touching only mass that cannot be expressed
    in floats) and exact ties from clamping are nudged apart.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    shape = prior.eta1 / 2.0
    while True:
        boost = rng.gamma(shape=shape + 1.0, scale=1.0, size=q)
        u = rng.random(size=q)
        with np.errstate(divide="ignore"):
            log_a = np.log(boost) + np.log(u) / shape + math.log(2.0 / prior.eta2)
        log_a = np.clip(log_a, -345.0, 345.0)
        d = np.sort(np.exp(-log_a))[::-1]
        if np.all(d[:-1] > d[1:]) if q > 1 else True:
            return d
        # clamping can tie draws; separate them without leaving the range
        for k in range(1, q):
            if d[k] >= d[k - 1]:
                d[k] = d[k - 1] * (1.0 - 1e-12)
        if np.all(d > 0):
            return d


def prior_sparsity_curve(
    q: int,
    z: int,
    nsim: int,
    rng: np.random.Generator,
    eigen_prior: EigenPrior = EigenPrior(1.0, 1.0),
    zero_tol: float = 1e-9,
) -> tuple[float, float]:
    """Median proportions of zeros in R and in K under z uniform rotators.

    Each replicate picks z pairs uniformly without replacement, draws their
    angles uniformly on (-pi/2, pi/2) and eigenvalues from ``eigen_prior``,
    then counts zeros in the off-diagonal of R (out of q(q-1) cells) and in
    the upper triangle of K (out of q(q-1)/2 cells).
    """
    m = q * (q - 1) // 2
    if not 0 < z < m:
        raise ValueError(f"z must satisfy 0 < z < m = {m}")
    pairs = np.array(all_pairs(q), dtype=np.int64) - 1
    ii = np.empty((nsim, z), dtype=np.int64)
    jj = np.empty((nsim, z), dtype=np.int64)
    for sim in range(nsim):
        chosen = np.sort(rng.choice(m, size=z, replace=False))
        ii[sim] = pairs[chosen, 0]
        jj[sim] = pairs[chosen, 1]
    ws = rng.uniform(-HALF_PI, HALF_PI, size=(nsim, z))
    eigs = np.empty((nsim, q))
    for sim in range(nsim):
        eigs[sim] = sample_eigenvalues(eigen_prior, q, rng)
    r_zeros, k_zeros = _kernels.sparsity_zero_counts(q, ii, jj, ws, eigs, zero_tol)
    r_prop = np.median(r_zeros) / (q * (q - 1))
    k_prop = np.median(k_zeros) / m
    return float(r_prop), float(k_prop)
