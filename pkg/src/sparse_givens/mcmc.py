"""Reversible-jump MCMC over sparse rotator sets for one Gaussian sample.

Each iteration runs a batch of birth/death proposals over the rotator set, a
Metropolis sweep over the active angles using locally fitted wrapped-Cauchy
proposals, and an ordered Gibbs update of the inverse eigenvalues.  All
likelihood evaluations ride on the single-angle quadratic form, so a full
iteration costs O(z^2 q + z q) rather than repeated dense rebuilds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import betaln, gammainc, gammaincc, gammaincinv, gammainccinv

from . import _kernels
from .givens import HALF_PI, GivensModel, all_pairs
from .likelihood import DecorrelationState, SumOfSquares
from .priors import AnglePrior, EigenPrior, sample_eigenvalues

__all__ = [
    "ProposalParams",
    "McmcConfig",
    "ChainState",
    "PosteriorSamples",
    "wrapped_cauchy_logpdf",
    "wrapped_cauchy_sample",
    "fit_proposal",
    "rj_step",
    "angle_sweep",
    "eigenvalue_gibbs",
    "run_chain",
    "summarize",
]

_GRID_POINTS = 129
_BOUNDARY_MARGIN = 1e-6
_BETA_FALLBACK_SHAPE = 0.25
_LOG_BETALN_FALLBACK = betaln(_BETA_FALLBACK_SHAPE, _BETA_FALLBACK_SHAPE)


# ---------------------------------------------------------------------------
# wrapped Cauchy proposal family
# ---------------------------------------------------------------------------

def wrapped_cauchy_logpdf(w, theta: float, sigma: float):
    """Log density of a Cauchy(theta, sigma) wrapped onto (-pi/2, pi/2).

    Density sinh(2 sigma) / (pi (cosh(2 sigma) - cos(2 (w - theta)))),
    evaluated through 1 + e^-4s - 2 e^-2s cos(2d) = sin^2(2d) + (e^-2s - cos(2d))^2
    so that both tiny and huge scales stay finite.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    e2 = math.exp(-2.0 * sigma)
    e4 = e2 * e2
    twod = 2.0 * (np.asarray(w) - theta)
    c = np.cos(twod)
    s = np.sin(twod)
    return np.log1p(-e4) - math.log(math.pi) - np.log(s * s + (e2 - c) ** 2)


def wrapped_cauchy_sample(theta: float, sigma: float,
                          rng: np.random.Generator) -> float:
    """Draw a standard Cauchy and wrap it modulo pi into (-pi/2, pi/2)."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    while True:
        raw = theta + sigma * rng.standard_cauchy()
        w = float((raw + HALF_PI) % math.pi - HALF_PI)
        if -HALF_PI < w < HALF_PI:
            return w


def _beta_fallback_logpdf(w) -> np.ndarray | float:
    # Be(0.25, 0.25) stretched onto (-pi/2, pi/2); Jacobian 1/pi; written in
    # terms of the distances to the endpoints to avoid cancellation there
    w = np.asarray(w)
    return (
        (_BETA_FALLBACK_SHAPE - 1.0)
        * (np.log(HALF_PI + w) + np.log(HALF_PI - w) - 2.0 * math.log(math.pi))
        - _LOG_BETALN_FALLBACK
        - math.log(math.pi)
    )


def _beta_fallback_sample(rng: np.random.Generator) -> float:
    while True:
        b = rng.beta(_BETA_FALLBACK_SHAPE, _BETA_FALLBACK_SHAPE)
        w = float(-HALF_PI + math.pi * b)
        if -HALF_PI < w < HALF_PI:
            return w


@dataclass(frozen=True)
class ProposalParams:
    """Location/scale of the fitted continuous proposal for one angle."""

    theta: float
    sigma: float
    boundary_fallback: bool = False


def _quad_value(coeffs, w: float) -> float:
    qc2, qs2, qsc, lc, ls = coeffs
    c, s = math.cos(w), math.sin(w)
    return qc2 * c * c + qs2 * s * s + qsc * s * c + lc * c + ls * s


def _posterior_derivs(coeffs, w: float) -> tuple[float, float]:
    # first and second derivative of -quad/2 (kappa already folded into qc2)
    qc2, qs2, qsc, lc, ls = coeffs
    amp = qc2 - qs2
    s2, c2 = math.sin(2 * w), math.cos(2 * w)
    s1, c1 = math.sin(w), math.cos(w)
    d1 = -0.5 * (-amp * s2 + qsc * c2 - lc * s1 + ls * c1)
    d2 = -0.5 * (-2.0 * amp * c2 - 2.0 * qsc * s2 - lc * c1 - ls * s1)
    return d1, d2


def fit_proposal_from_coeffs(coeffs, kappa: float) -> ProposalParams:
    """Laplace-style fit of the conditional posterior for one angle.

    The location is the interior mode of the quadratic-form log posterior
    (found by grid seeding plus safeguarded Newton polish to ~1e-10); the
    scale comes from the negative inverse curvature at the mode.  A flat
    objective, a mode within 1e-6 of the boundary, or non-negative curvature
    flags the heavy-tailed fallback proposal instead.
    """
    qc2, qs2, qsc, lc, ls = coeffs
    qc2 = qc2 - 2.0 * kappa
    scale = max(abs(qc2), abs(qs2), 1.0)
    if max(abs(qc2 - qs2), abs(qsc), abs(lc), abs(ls)) <= 1e-13 * scale:
        return ProposalParams(theta=0.0, sigma=math.pi, boundary_fallback=True)
    lo = -HALF_PI * (1.0 - 1e-9)
    hi = HALF_PI * (1.0 - 1e-9)
    w, d2 = _kernels.fit_quad_mode(qc2, qs2, qsc, lc, ls, lo, hi, _GRID_POINTS)
    if d2 >= 0.0 or abs(w) >= HALF_PI - _BOUNDARY_MARGIN:
        return ProposalParams(theta=0.0, sigma=math.pi, boundary_fallback=True)
    # floor the scale: a fully degenerate proposal would make its own density
    # evaluations overflow, and never helps mixing
    sigma = max(1.0 / math.sqrt(-d2), 1e-12)
    return ProposalParams(theta=float(w), sigma=float(sigma))


def fit_proposal(pair: tuple[int, int], state: DecorrelationState,
                 prior: AnglePrior) -> ProposalParams:
    """Fit the proposal for the pair at the state's cursor."""
    if pair != state.expected_pair():
        raise ValueError(f"state cursor is at {state.expected_pair()}, not {pair}")
    i, j = pair[0] - 1, pair[1] - 1
    coeffs = _kernels.conditional_coeffs(state.S_star, state.A_star, i, j)
    return fit_proposal_from_coeffs(coeffs, prior.kappa)


def _proposal_logpdf(params: ProposalParams, beta_half: float, w: float) -> float:
    if w == HALF_PI:
        return math.log(beta_half) if beta_half > 0 else -math.inf
    if params.boundary_fallback:
        lp = (
            (_BETA_FALLBACK_SHAPE - 1.0)
            * (math.log(HALF_PI + w) + math.log(HALF_PI - w)
               - 2.0 * math.log(math.pi))
            - _LOG_BETALN_FALLBACK
            - math.log(math.pi)
        )
    else:
        e2 = math.exp(-2.0 * params.sigma)
        e4 = e2 * e2
        twod = 2.0 * (w - params.theta)
        c, s = math.cos(twod), math.sin(twod)
        lp = (
            math.log1p(-e4)
            - math.log(math.pi)
            - math.log(s * s + (e2 - c) * (e2 - c))
        )
    return math.log1p(-beta_half) + lp


def _proposal_draw(params: ProposalParams, beta_half: float,
                   rng: np.random.Generator) -> tuple[float, float]:
    if rng.random() < beta_half:
        return HALF_PI, math.log(beta_half)
    w = 0.0
    while w == 0.0:  # the exact-zero atom belongs to the death move only
        if params.boundary_fallback:
            w = _beta_fallback_sample(rng)
        else:
            w = wrapped_cauchy_sample(params.theta, params.sigma, rng)
    return w, _proposal_logpdf(params, beta_half, w)


def _angle_log_prior_fast(prior: AnglePrior, w: float) -> float:
    if w == HALF_PI:
        return prior.log_mass_half
    if w == 0.0:
        return prior.log_mass_zero
    return prior.log_weight_continuous + prior.log_c_kappa \
        + prior.kappa * math.cos(w) ** 2


# ---------------------------------------------------------------------------
# chain state and configuration
# ---------------------------------------------------------------------------

@dataclass
class McmcConfig:
    """Schedule and priors for one chain."""

    iterations: int = 15000
    burn_in: int = 10000
    thin: int = 1
    p_birth: float = 0.5
    p_death: float = 0.5
    rj_proposals_per_iter: int | None = None  # None -> max(10, current z)
    angle_prior: AnglePrior = field(default_factory=AnglePrior)
    eigen_prior: EigenPrior = field(default_factory=EigenPrior)
    seed: int = 0
    init_rho: float | None = 0.5  # None -> start from the empty rotator set

    def __post_init__(self) -> None:
        if self.burn_in >= self.iterations:
            raise ValueError("burn_in must be smaller than iterations")
        if self.thin < 1:
            raise ValueError("thin must be >= 1")
        if self.p_birth < 0 or self.p_death < 0 or self.p_birth + self.p_death > 1:
            raise ValueError("p_birth and p_death must be nonnegative, sum <= 1")


class ChainState:
    """Live RJ-MCMC state: sorted rotator indices, angles, inverse eigenvalues.

    ``idx`` holds the flat lexicographic rank of each active pair so that
    insertion order is canonical; ``a`` is the increasing inverse-eigenvalue
    vector (a = 1/d).  ``loglik`` caches the full log likelihood including the
    (n/2) sum(log a) determinant term; it is refreshed exactly once per
    iteration by the eigenvalue update, so incremental float drift cannot
    accumulate.
    """

    def __init__(self, ss: SumOfSquares, idx: np.ndarray, angles: np.ndarray,
                 a: np.ndarray):
        self.ss = ss
        self.q = ss.q
        self.m = self.q * (self.q - 1) // 2
        pairs = np.array(all_pairs(self.q), dtype=np.int64).reshape(-1, 2) - 1
        self._pair_rows = pairs[:, 0].copy()
        self._pair_cols = pairs[:, 1].copy()
        self.idx = np.asarray(idx, dtype=np.int64)
        self.angles = np.asarray(angles, dtype=np.float64)
        self._ii = self._pair_rows[self.idx]
        self._jj = self._pair_cols[self.idx]
        self.a = np.asarray(a, dtype=np.float64)
        self.loglik = self.compute_loglik()

    @property
    def z(self) -> int:
        return len(self.idx)

    @property
    def ii(self) -> np.ndarray:
        return self._ii

    @property
    def jj(self) -> np.ndarray:
        return self._jj

    def insert_rotator(self, pos: int, flat: int, angle: float) -> None:
        self.idx = np.insert(self.idx, pos, flat)
        self.angles = np.insert(self.angles, pos, angle)
        self._ii = np.insert(self._ii, pos, self._pair_rows[flat])
        self._jj = np.insert(self._jj, pos, self._pair_cols[flat])

    def remove_rotator(self, pos: int) -> None:
        self.idx = np.delete(self.idx, pos)
        self.angles = np.delete(self.angles, pos)
        self._ii = np.delete(self._ii, pos)
        self._jj = np.delete(self._jj, pos)

    def b_diagonal(self) -> np.ndarray:
        """diag(R' S R) for the current rotators."""
        B = np.array(self.ss.S, copy=True)
        _kernels.conjugate_ascending(B, self.ii, self.jj, self.angles, self.z)
        return np.diag(B).copy()

    def compute_loglik(self) -> float:
        b = self.b_diagonal()
        return 0.5 * self.ss.n * float(np.sum(np.log(self.a))) \
            - 0.5 * float(b @ self.a)

    def model(self) -> GivensModel:
        pairs = tuple(
            (int(self._pair_rows[t]) + 1, int(self._pair_cols[t]) + 1)
            for t in self.idx
        )
        return GivensModel(q=self.q, pairs=pairs, angles=tuple(self.angles),
                           eigenvalues=tuple(1.0 / self.a))

@dataclass
class PosteriorSamples:
    """Thinned post-burn-in draws plus per-move acceptance counters."""

    q: int
    m: int
    n: int
    draws: list = field(default_factory=list)  # (flat idx, angles, eigenvalues)
    counters: dict = field(default_factory=dict)
    config: McmcConfig | None = None

    def __len__(self) -> int:
        return len(self.draws)

    def rotator_counts(self) -> np.ndarray:
        return np.array([len(d[0]) for d in self.draws], dtype=np.int64)

    def models(self):
        pairs = all_pairs(self.q)
        for idx, ws, d in self.draws:
            yield GivensModel(
                q=self.q,
                pairs=tuple(pairs[t] for t in idx),
                angles=tuple(ws),
                eigenvalues=tuple(d),
            )

    def extend(self, other: "PosteriorSamples") -> None:
        if (other.q, other.m, other.n) != (self.q, self.m, self.n):
            raise ValueError("cannot merge samples from different problems")
        self.draws.extend(other.draws)
        for key, val in other.counters.items():
            self.counters[key] = self.counters.get(key, 0) + val

    def to_dict(self) -> dict:
        pairs = all_pairs(self.q)
        return {
            "q": self.q,
            "m": self.m,
            "n": self.n,
            "counters": dict(self.counters),
            "draws": [
                {
                    "rotators": [
                        {"i": pairs[t][0], "j": pairs[t][1], "angle": float(w)}
                        for t, w in zip(idx, ws)
                    ],
                    "eigenvalues": [float(v) for v in d],
                }
                for idx, ws, d in self.draws
            ],
        }


# ---------------------------------------------------------------------------
# moves
# ---------------------------------------------------------------------------

def _complement_member(idx: np.ndarray, m: int, r: int) -> int:
    """The r-th flat pair index (0-based) not currently active."""
    # idx is sorted; count how many active indices precede each candidate
    lo, hi = 0, m - 1
    while lo < hi:
        mid = (lo + hi) // 2
        missing = mid + 1 - int(np.searchsorted(idx, mid, side="right"))
        if missing >= r + 1:
            hi = mid
        else:
            lo = mid + 1
    return lo


def rj_step(chain: ChainState, config: McmcConfig, rng: np.random.Generator,
            counters: dict | None = None) -> ChainState:
    """One birth-or-death proposal on the rotator set."""
    prior = config.angle_prior
    u = rng.random()
    if u < config.p_birth:
        move = "birth"
    elif u < config.p_birth + config.p_death:
        move = "death"
    else:
        return chain
    if counters is not None:
        counters[f"{move}_proposed"] = counters.get(f"{move}_proposed", 0) + 1
    z, m = chain.z, chain.m

    if move == "birth":
        if z == m:
            return chain
        r = int(rng.integers(m - z))
        flat = _complement_member(chain.idx, m, r)
        pos = int(np.searchsorted(chain.idx, flat))
        i0 = chain._pair_rows[flat]
        j0 = chain._pair_cols[flat]
        coeffs = _kernels.insertion_coeffs(
            chain.ss.S, chain.a, chain._ii, chain._jj, chain.angles,
            pos, pos, i0, j0)
        params = fit_proposal_from_coeffs(coeffs, prior.kappa)
        w_new, log_g = _proposal_draw(params, prior.beta_half, rng)
        dll = -0.5 * (_quad_value(coeffs, w_new) - _quad_value(coeffs, 0.0))
        # detailed balance: the birth picks one of m-z free pairs, the
        # reverse death one of z+1 active rotators
        log_alpha = (
            dll
            + _angle_log_prior_fast(prior, w_new)
            - prior.log_mass_zero
            - log_g
            + math.log(m - z)
            + math.log(config.p_death)
            - math.log(z + 1)
            - math.log(config.p_birth)
        )
        if math.log(rng.random()) < log_alpha:
            chain.insert_rotator(pos, int(flat), w_new)
            chain.loglik += dll
            if counters is not None:
                counters["birth_accepted"] = counters.get("birth_accepted", 0) + 1
        return chain

    if z == 0:
        return chain
    k = int(rng.integers(z))
    i0, j0 = chain._ii[k], chain._jj[k]
    coeffs = _kernels.insertion_coeffs(
        chain.ss.S, chain.a, chain._ii, chain._jj, chain.angles, k, k + 1, i0, j0)
    params = fit_proposal_from_coeffs(coeffs, prior.kappa)
    w_cur = float(chain.angles[k])
    log_g_cur = _proposal_logpdf(params, prior.beta_half, w_cur)
    dll = -0.5 * (_quad_value(coeffs, 0.0) - _quad_value(coeffs, w_cur))
    log_alpha = (
        dll
        + prior.log_mass_zero
        - _angle_log_prior_fast(prior, w_cur)
        + log_g_cur
        + math.log(z)
        + math.log(config.p_birth)
        - math.log(m - z + 1)
        - math.log(config.p_death)
    )
    if math.log(rng.random()) < log_alpha:
        chain.remove_rotator(k)
        chain.loglik += dll
        if counters is not None:
            counters["death_accepted"] = counters.get("death_accepted", 0) + 1
    return chain


def angle_sweep(chain: ChainState, config: McmcConfig, rng: np.random.Generator,
                counters: dict | None = None) -> np.ndarray:
    """Metropolis update of every active angle in canonical order.

    Walks the recursion: S* absorbs each rotator at its freshly accepted
    angle while A* sheds the next rotator at its current angle.  Returns the
    diagonal of R' S R for the eigenvalue update.
    """
    prior = config.angle_prior
    ii, jj, ws = chain.ii, chain.jj, chain.angles
    S_star = np.array(chain.ss.S, copy=True)
    A_star = np.zeros((chain.q, chain.q))
    A_star[np.diag_indices(chain.q)] = chain.a
    _kernels.conjugate_descending(A_star, ii, jj, ws, 1)
    for k in range(chain.z):
        i0, j0 = ii[k], jj[k]
        coeffs = _kernels.conditional_coeffs(S_star, A_star, i0, j0)
        params = fit_proposal_from_coeffs(coeffs, prior.kappa)
        w_cur = float(ws[k])
        w_new, log_g_new = _proposal_draw(params, prior.beta_half, rng)
        dll = -0.5 * (_quad_value(coeffs, w_new) - _quad_value(coeffs, w_cur))
        log_alpha = (
            dll
            + _angle_log_prior_fast(prior, w_new)
            - _angle_log_prior_fast(prior, w_cur)
            + _proposal_logpdf(params, prior.beta_half, w_cur)
            - log_g_new
        )
        if counters is not None:
            counters["angle_proposed"] = counters.get("angle_proposed", 0) + 1
        if math.log(rng.random()) < log_alpha:
            ws[k] = w_new
            chain.loglik += dll
            if counters is not None:
                counters["angle_accepted"] = counters.get("angle_accepted", 0) + 1
        # fold the (possibly new) angle k into S*, peel rotator k+1 from A*
        _kernels.conjugate_pair(S_star, i0, j0, math.cos(ws[k]), math.sin(ws[k]))
        if k + 1 < chain.z:
            _kernels.conjugate_pair(
                A_star, ii[k + 1], jj[k + 1],
                math.cos(ws[k + 1]), math.sin(ws[k + 1]),
            )
    chain.angles = ws
    return np.diag(S_star).copy()


def _trunc_gamma_inverse_cdf(shape: float, rate: float, lo: float, hi: float,
                             rng: np.random.Generator) -> float:
    """Inverse-CDF draw from Gamma(shape, rate) truncated to (lo, hi).

    Works in whichever tail representation keeps the interval's CDF mass
    well scaled (lower for deep lower-tail intervals, complementary for
    upper-tail ones); intervals whose mass underflows double precision are
    sampled uniformly.
    """
    xlo = lo * rate
    xhi = hi * rate if math.isfinite(hi) else math.inf
    plo = float(gammainc(shape, xlo)) if xlo > 0 else 0.0
    phi = float(gammainc(shape, xhi)) if math.isfinite(xhi) else 1.0
    qlo = float(gammaincc(shape, xlo)) if xlo > 0 else 1.0
    qhi = float(gammaincc(shape, xhi)) if math.isfinite(xhi) else 0.0
    for _ in range(100):
        u = rng.random()
        if phi <= qlo and phi - plo > 0.0:
            x = float(gammaincinv(shape, plo + u * (phi - plo))) / rate
        elif qlo - qhi > 0.0:
            x = float(gammainccinv(shape, qhi + (1.0 - u) * (qlo - qhi))) / rate
        else:
            # interval mass is below double precision; sample it uniformly
            top = hi if math.isfinite(hi) else lo * (1.0 + 1e-12) + 1e-300
            x = float(rng.uniform(lo, top))
        if not lo < x < hi:
            # inversion landed on the boundary: nudge into the open interval
            guard_lo = math.nextafter(lo, math.inf)
            guard_hi = math.nextafter(hi, -math.inf) if math.isfinite(hi) else math.inf
            x = min(max(x, guard_lo), guard_hi)
        if lo < x < hi:
            return x
    raise RuntimeError(
        f"could not draw from Gamma({shape}, rate={rate}) truncated to ({lo}, {hi})"
    )


def eigenvalue_gibbs(chain: ChainState, config: McmcConfig,
                     rng: np.random.Generator,
                     b_diag: np.ndarray | None = None) -> ChainState:
    """Ordered Gibbs update of the inverse eigenvalues a_1 < ... < a_q."""
    if b_diag is None:
        b_diag = chain.b_diagonal()
    eta1, eta2 = config.eigen_prior.eta1, config.eigen_prior.eta2
    n = chain.ss.n
    shape = 0.5 * (eta1 + n)
    a = chain.a
    q = chain.q
    for j in range(q):
        lo = a[j - 1] if j > 0 else 0.0
        hi = a[j + 1] if j < q - 1 else math.inf
        rate = 0.5 * (eta2 + b_diag[j])
        a[j] = _trunc_gamma_inverse_cdf(shape, rate, lo, hi, rng)
    chain.a = a
    chain.loglik = 0.5 * n * float(np.sum(np.log(a))) - 0.5 * float(b_diag @ a)
    return chain


# ---------------------------------------------------------------------------
# chain driver
# ---------------------------------------------------------------------------

def _initial_state(ss: SumOfSquares, config: McmcConfig,
                   rng: np.random.Generator) -> ChainState:
    from .explore import ExploreConfig, exploratory_fit

    if config.init_rho is not None and ss.n > ss.q:
        try:
            model, _ = exploratory_fit(ss, ExploreConfig(rho=config.init_rho))
            ii, jj, ws = model.pair_arrays()
            idx = np.array(
                [i0 * ss.q - i0 * (i0 + 1) // 2 + (j0 - i0 - 1)
                 for i0, j0 in zip(ii, jj)],
                dtype=np.int64,
            )
            return ChainState(ss, idx, ws, 1.0 / np.asarray(model.eigenvalues))
        except (np.linalg.LinAlgError, ValueError):
            pass
    if ss.n > 0:
        d = np.sort(np.diag(ss.S))[::-1] / max(ss.n, 1)
        d = np.maximum(d, 1e-12)
        for k in range(1, ss.q):
            if d[k] >= d[k - 1]:
                d[k] = d[k - 1] * (1.0 - 1e-9)
    else:
        d = sample_eigenvalues(config.eigen_prior, ss.q, rng)
    return ChainState(ss, np.empty(0, dtype=np.int64), np.empty(0), 1.0 / d)


def run_chain(data, config: McmcConfig,
              initial: GivensModel | None = None) -> PosteriorSamples:
    """Run one chain; ``data`` is a pre-centered matrix or a SumOfSquares."""
    ss = data if isinstance(data, SumOfSquares) else \
        SumOfSquares.from_data(np.asarray(data), center=False)
    rng = np.random.default_rng(config.seed)
    if initial is not None:
        ii, jj, ws = initial.pair_arrays()
        q = ss.q
        idx = np.array(
            [i0 * q - i0 * (i0 + 1) // 2 + (j0 - i0 - 1) for i0, j0 in zip(ii, jj)],
            dtype=np.int64,
        )
        chain = ChainState(ss, idx, ws, 1.0 / np.asarray(initial.eigenvalues))
    else:
        chain = _initial_state(ss, config, rng)
    counters: dict = {}
    samples = PosteriorSamples(q=ss.q, m=chain.m, n=ss.n, counters=counters,
                               config=config)
    for it in range(config.iterations):
        nprop = config.rj_proposals_per_iter
        if nprop is None:
            nprop = max(10, chain.z)
        for _ in range(nprop):
            rj_step(chain, config, rng, counters)
        b_diag = angle_sweep(chain, config, rng, counters)
        eigenvalue_gibbs(chain, config, rng, b_diag)
        if it >= config.burn_in and (it - config.burn_in) % config.thin == 0:
            samples.draws.append(
                (chain.idx.copy(), chain.angles.copy(), 1.0 / chain.a)
            )
    return samples


# ---------------------------------------------------------------------------
# posterior summaries
# ---------------------------------------------------------------------------

def _stacked_precisions(samples: PosteriorSamples,
                        zero_tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """Stack per-draw precision matrices and their off-diagonal patterns."""
    q = samples.q
    pairs = np.array(all_pairs(q), dtype=np.int64) - 1
    zs = samples.rotator_counts()
    if len(zs) == 0:
        raise ValueError("no stored draws")
    idx_flat = np.concatenate([d[0] for d in samples.draws]) if zs.sum() else \
        np.empty(0, dtype=np.int64)
    ws_flat = np.concatenate([d[1] for d in samples.draws]) if zs.sum() else \
        np.empty(0)
    a2d = np.stack([1.0 / d[2] for d in samples.draws])
    ii_flat = pairs[idx_flat, 0] if len(idx_flat) else np.empty(0, dtype=np.int64)
    jj_flat = pairs[idx_flat, 1] if len(idx_flat) else np.empty(0, dtype=np.int64)
    K = _kernels.precision_batch(q, zs, ii_flat, jj_flat, ws_flat, a2d)
    thresh = zero_tol * np.abs(K).reshape(len(zs), -1).max(axis=1)
    patterns = np.abs(K) > thresh[:, None, None]
    return K, patterns


def summarize(samples: PosteriorSamples, zero_tol: float = 1e-9) -> dict:
    """Edge probabilities, mean scaled eigenmatrix, and sparsity quantiles.

    Percentages follow the usual conventions: rotator counts out of m, zeros
    of R out of the q(q-1) off-diagonal cells.
    """
    if len(samples) == 0:
        raise ValueError("no stored draws to summarize")
    q = samples.q
    pairs = np.array(all_pairs(q), dtype=np.int64) - 1
    _, patterns = _stacked_precisions(samples, zero_tol)
    off = ~np.eye(q, dtype=bool)
    edge_prob = (patterns & off).mean(axis=0)
    edge_prob[~off] = 0.0

    loading_sum = np.zeros((q, q))
    r_zero_pct = np.empty(len(samples))
    for t, (idx, ws, d) in enumerate(samples.draws):
        R = _kernels.compose_rotations(q, pairs[idx, 0], pairs[idx, 1], ws)
        loading_sum += R * np.sqrt(d)[None, :]
        rthr = zero_tol * np.abs(R).max()
        r_zero_pct[t] = 100.0 * ((np.abs(R) <= rthr) & off).sum() / (q * (q - 1))
    zs = samples.rotator_counts()
    quants = [2.5, 50.0, 97.5]
    return {
        "edge_probability": edge_prob,
        "mean_scaled_eigenmatrix": loading_sum / len(samples),
        "rotator_count_quantiles": np.percentile(zs, quants),
        "pct_nonzero_rotators_quantiles": np.percentile(
            100.0 * zs / samples.m, quants),
        "pct_zeros_r_quantiles": np.percentile(r_zero_pct, quants),
    }
