"""Gaussian mixtures of sparse full-rank factor models with measurement error.

Observed vectors are latent signals plus independent diagonal-variance noise;
the signals follow a C-component Gaussian mixture whose component covariances
carry the sparse rotator structure.  The posterior simulation interleaves
label, weight, mean, component-model, latent-signal, and noise-variance
updates, with a membership-overlap relabelling pass each iteration (matching
on means is also available but cannot pin empty components, whose means are
fresh vague-prior draws).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .explore import ExploreConfig, exploratory_fit
from .givens import GivensModel, all_pairs, build_precision, compose_eigenmatrix
from .likelihood import SumOfSquares
from .mcmc import ChainState, McmcConfig, angle_sweep, eigenvalue_gibbs, rj_step
from .priors import AnglePrior, EigenPrior, sample_angle, sample_eigenvalues

__all__ = [
    "MixtureConfig",
    "MixtureState",
    "MixtureSamples",
    "init_kmeans",
    "sample_latent",
    "sample_psi",
    "sample_labels",
    "sample_weights",
    "sample_means",
    "update_component_models",
    "relabel",
    "relabel_by_membership",
    "mixture_gibbs_iteration",
    "run_mixture_chain",
]


@dataclass(frozen=True)
class MixtureConfig:
    """Component count, priors, and MCMC schedule for the mixture sampler."""

    n_components: int
    iterations: int = 2000
    burn_in: int = 1000
    thin: int = 1
    tau: float = 1000.0
    psi_a: float = 3.1
    psi_b: float = 0.17
    angle_prior: AnglePrior = field(default_factory=AnglePrior)
    eigen_prior: EigenPrior = field(default_factory=EigenPrior)
    rj_proposals_per_iter: int | None = None
    seed: int = 0
    init_rho: float = 0.5
    kmeans_restarts: int = 10
    kmeans_iterations: int = 100

    def __post_init__(self) -> None:
        if self.n_components < 1:
            raise ValueError("need at least one component")
        if self.tau <= 0 or self.psi_a <= 0 or self.psi_b <= 0:
            raise ValueError("tau and the noise-variance hyperparameters must be positive")
        if self.burn_in >= self.iterations:
            raise ValueError("burn_in must be smaller than iterations")

    def chain_config(self) -> McmcConfig:
        return McmcConfig(
            iterations=2, burn_in=1, thin=1,
            angle_prior=self.angle_prior, eigen_prior=self.eigen_prior,
            rj_proposals_per_iter=self.rj_proposals_per_iter, seed=self.seed,
        )


@dataclass
class MixtureState:
    """Weights, means, component models, noise variances, labels, signals."""

    w: np.ndarray            # (C,)
    mu: np.ndarray           # (C, q)
    models: list[GivensModel]
    psi: np.ndarray          # (q,)
    gamma: np.ndarray        # (n,) labels in 0..C-1
    X: np.ndarray            # (n, q) latent signals

    @property
    def n_components(self) -> int:
        return len(self.w)

    @property
    def q(self) -> int:
        return self.mu.shape[1]


def _prior_model_draw(q: int, angle_prior: AnglePrior, eigen_prior: EigenPrior,
                      rng: np.random.Generator) -> GivensModel:
    pairs, ws = [], []
    for pair in all_pairs(q):
        w = sample_angle(angle_prior, rng)
        if w != 0.0:
            pairs.append(pair)
            ws.append(w)
    d = sample_eigenvalues(eigen_prior, q, rng)
    return GivensModel(q=q, pairs=tuple(pairs), angles=tuple(ws),
                       eigenvalues=tuple(d))


def _kmeans(Y: np.ndarray, C: int, rng: np.random.Generator,
            restarts: int, iterations: int) -> np.ndarray:
    n = Y.shape[0]
    best_labels, best_cost = None, math.inf
    for _ in range(restarts):
        centers = Y[rng.choice(n, size=C, replace=False)].copy()
        labels = np.zeros(n, dtype=np.int64)
        for _ in range(iterations):
            d2 = ((Y[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
            new_labels = d2.argmin(axis=1)
            for c in range(C):
                members = new_labels == c
                if members.any():
                    centers[c] = Y[members].mean(axis=0)
                else:
                    # reseed an empty cluster at the worst-fit point
                    centers[c] = Y[d2.min(axis=1).argmax()]
            if np.array_equal(new_labels, labels):
                break
            labels = new_labels
        cost = float(((Y - centers[labels]) ** 2).sum())
        if cost < best_cost:
            best_cost, best_labels = cost, labels.copy()
    return best_labels


def init_kmeans(Y: np.ndarray, config: MixtureConfig,
                rng: np.random.Generator) -> MixtureState:
    """Crude k-means classification plus per-group exploratory model fits."""
    Y = np.asarray(Y, dtype=np.float64)
    n, q = Y.shape
    C = config.n_components
    if n < C:
        raise ValueError("need at least as many observations as components")
    gamma = _kmeans(Y, C, rng, config.kmeans_restarts, config.kmeans_iterations)
    for c in range(C):
        if not np.any(gamma == c):
            warnings.warn(f"k-means left component {c} empty; reassigning nearest point",
                          stacklevel=2)
            centers = np.array([Y[gamma == b].mean(axis=0) if np.any(gamma == b)
                                else Y.mean(axis=0) for b in range(C)])
            gamma[((Y - centers[c]) ** 2).sum(axis=1).argmin()] = c
    w = np.bincount(gamma, minlength=C) / n
    mu = np.stack([Y[gamma == c].mean(axis=0) for c in range(C)])
    models = []
    for c in range(C):
        Yc = Y[gamma == c] - mu[c]
        if Yc.shape[0] > q + 1:
            try:
                model, _ = exploratory_fit(
                    SumOfSquares(S=Yc.T @ Yc, n=Yc.shape[0]),
                    ExploreConfig(rho=config.init_rho),
                )
            except (ValueError, np.linalg.LinAlgError):
                model = _prior_model_draw(q, config.angle_prior,
                                          config.eigen_prior, rng)
        else:
            model = _prior_model_draw(q, config.angle_prior,
                                      config.eigen_prior, rng)
        models.append(model)
    psi = 1.0 / rng.gamma(shape=config.psi_a, scale=1.0 / config.psi_b, size=q)
    return MixtureState(w=w, mu=mu, models=models, psi=psi, gamma=gamma,
                        X=Y.copy())


def _component_precisions(state: MixtureState) -> list[tuple[np.ndarray, np.ndarray]]:
    # (R_c, a_c) per component; K_c = R_c diag(a_c) R_c'
    out = []
    for model in state.models:
        R = compose_eigenmatrix(model)
        out.append((R, 1.0 / np.asarray(model.eigenvalues)))
    return out


def sample_latent(Y: np.ndarray, state: MixtureState,
                  rng: np.random.Generator) -> np.ndarray:
    """Draw the latent signals from their conditional normals."""
    n, q = Y.shape
    X = np.empty_like(Y)
    psi_inv = 1.0 / state.psi
    for c, (R, a) in enumerate(_component_precisions(state)):
        members = np.flatnonzero(state.gamma == c)
        if len(members) == 0:
            continue
        K_c = (R * a[None, :]) @ R.T
        M_inv = np.diag(psi_inv) + K_c
        L = np.linalg.cholesky(M_inv)
        rhs = (Y[members] * psi_inv[None, :] + (K_c @ state.mu[c])[None, :]).T
        mean = np.linalg.solve(M_inv, rhs).T
        zdraw = rng.standard_normal((len(members), q))
        # x = m + L^-T z has covariance M_inv^-1
        X[members] = mean + np.linalg.solve(L.T, zdraw.T).T
    return X


def sample_psi(Y: np.ndarray, X: np.ndarray, config: MixtureConfig,
               rng: np.random.Generator) -> np.ndarray:
    """Conjugate inverse-gamma update of the diagonal noise variances."""
    n = Y.shape[0]
    resid2 = ((Y - X) ** 2).sum(axis=0)
    shape = config.psi_a + 0.5 * n
    rate = config.psi_b + 0.5 * resid2
    return rate / rng.gamma(shape=shape, size=Y.shape[1])


def _log_component_densities(state: MixtureState) -> np.ndarray:
    # (n, C): log N(x_i | mu_c, Sigma_c), computed through the eigenstructure
    n, q = state.X.shape
    out = np.empty((n, state.n_components))
    for c, (R, a) in enumerate(_component_precisions(state)):
        Z = (state.X - state.mu[c]) @ R
        quad = (Z * Z * a[None, :]).sum(axis=1)
        out[:, c] = 0.5 * (np.sum(np.log(a)) - quad - q * math.log(2 * math.pi))
    return out


def sample_labels(state: MixtureState, rng: np.random.Generator) -> np.ndarray:
    """Multinomial component indicators with max-stabilised log probabilities."""
    logp = _log_component_densities(state) + np.log(np.maximum(state.w, 1e-300))
    logp -= logp.max(axis=1, keepdims=True)
    probs = np.exp(logp)
    probs /= probs.sum(axis=1, keepdims=True)
    u = rng.random(probs.shape[0])
    return (probs.cumsum(axis=1) < u[:, None]).sum(axis=1).astype(np.int64)


def sample_weights(state: MixtureState, config: MixtureConfig,
                   rng: np.random.Generator) -> np.ndarray:
    """Dirichlet update with concentration 1/C + group count."""
    C = config.n_components
    counts = np.bincount(state.gamma, minlength=C)
    return rng.dirichlet(1.0 / C + counts)


def sample_means(state: MixtureState, config: MixtureConfig,
                 rng: np.random.Generator) -> np.ndarray:
    """Conjugate normal update of the component means."""
    C, q = config.n_components, state.q
    mu = np.empty((C, q))
    for c, (R, a) in enumerate(_component_precisions(state)):
        members = state.gamma == c
        n_c = int(members.sum())
        coef = 1.0 / (n_c + 1.0 / config.tau)
        center = coef * n_c * state.X[members].mean(axis=0) if n_c else np.zeros(q)
        scale = np.sqrt(coef / a)  # coef * Sigma_c has eigenvalues coef * d
        mu[c] = center + R @ (scale * rng.standard_normal(q))
    return mu


def update_component_models(state: MixtureState, config: MixtureConfig,
                            rng: np.random.Generator) -> list[GivensModel]:
    """One RJ-MCMC kernel pass per component on its centered group signals.

    Components are updated on independent spawned substreams, so the result
    does not depend on update order; empty components draw from the prior.
    """
    C, q = config.n_components, state.q
    chain_cfg = config.chain_config()
    children = rng.spawn(C)
    new_models = []
    for c in range(C):
        members = state.gamma == c
        n_c = int(members.sum())
        child = children[c]
        if n_c == 0:
            new_models.append(
                _prior_model_draw(q, config.angle_prior, config.eigen_prior, child)
            )
            continue
        Xc = state.X[members] - state.mu[c]
        ss_c = SumOfSquares(S=Xc.T @ Xc, n=n_c)
        model = state.models[c]
        ii, jj, ws = model.pair_arrays()
        idx = np.array(
            [i0 * q - i0 * (i0 + 1) // 2 + (j0 - i0 - 1) for i0, j0 in zip(ii, jj)],
            dtype=np.int64,
        )
        chain = ChainState(ss_c, idx, ws, 1.0 / np.asarray(model.eigenvalues))
        nprop = config.rj_proposals_per_iter
        if nprop is None:
            nprop = max(10, chain.z)
        for _ in range(nprop):
            rj_step(chain, chain_cfg, child)
        b_diag = angle_sweep(chain, chain_cfg, child)
        eigenvalue_gibbs(chain, chain_cfg, child, b_diag)
        new_models.append(chain.model())
    return new_models


def _apply_permutation(state: MixtureState, perm: np.ndarray) -> MixtureState:
    # perm[new position] = old component index
    C = state.n_components
    if np.array_equal(perm, np.arange(C)):
        return state
    remap = np.empty(C, dtype=np.int64)
    remap[perm] = np.arange(C)
    return MixtureState(
        w=state.w[perm],
        mu=state.mu[perm],
        models=[state.models[t] for t in perm],
        psi=state.psi,
        gamma=remap[state.gamma],
        X=state.X,
    )


def relabel(state: MixtureState, reference_mu: np.ndarray) -> MixtureState:
    """Permute components to best match a reference set of means.

    Minimises the total squared distance between current and reference means
    by optimal assignment; every state field is permuted consistently.
    """
    C = state.n_components
    cost = ((state.mu[:, None, :] - reference_mu[None, :, :]) ** 2).sum(axis=2)
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(C, dtype=np.int64)
    for r, c in zip(rows, cols):
        perm[c] = r
    return _apply_permutation(state, perm)


def relabel_by_membership(state: MixtureState,
                          reference_gamma: np.ndarray) -> MixtureState:
    """Permute components to maximise label overlap with a reference.

    Mean-distance matching cannot pin down empty components (their means are
    fresh vague-prior draws each iteration, so all their distances are
    arbitrarily large and effectively random); overlap of the allocation
    vectors is stable for occupied components and leaves empty slots in
    place.
    """
    C = state.n_components
    cost = np.zeros((C, C))
    for r in range(C):
        members = state.gamma == r
        for c in range(C):
            cost[r, c] = -float(np.sum(members & (reference_gamma == c)))
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(C, dtype=np.int64)
    for r, c in zip(rows, cols):
        perm[c] = r
    return _apply_permutation(state, perm)


def mixture_gibbs_iteration(Y: np.ndarray, state: MixtureState,
                            config: MixtureConfig, rng: np.random.Generator,
                            reference_gamma: np.ndarray | None = None) -> MixtureState:
    """One full sweep: labels, weights, means, models, latent X, noise, relabel."""
    state.gamma = sample_labels(state, rng)
    state.w = sample_weights(state, config, rng)
    state.mu = sample_means(state, config, rng)
    state.models = update_component_models(state, config, rng)
    state.X = sample_latent(Y, state, rng)
    state.psi = sample_psi(Y, state.X, config, rng)
    if reference_gamma is not None:
        state = relabel_by_membership(state, reference_gamma)
    return state


@dataclass
class MixtureSamples:
    """Accumulated posterior summaries of a mixture run."""

    q: int
    n_components: int
    n: int
    kept: int = 0
    w_draws: list = field(default_factory=list)
    mu_draws: list = field(default_factory=list)
    psi_draws: list = field(default_factory=list)
    z_draws: list = field(default_factory=list)          # (C,) per draw
    r_zero_pct_draws: list = field(default_factory=list)  # (C,) per draw
    edge_prob_sum: np.ndarray | None = None
    loading_sum: np.ndarray | None = None
    class_counts: np.ndarray | None = None

    def classification_probabilities(self) -> np.ndarray:
        return self.class_counts / max(self.kept, 1)

    def edge_probability(self, c: int) -> np.ndarray:
        return self.edge_prob_sum[c] / max(self.kept, 1)

    def mean_scaled_eigenmatrix(self, c: int) -> np.ndarray:
        return self.loading_sum[c] / max(self.kept, 1)

    def mean_weights(self) -> np.ndarray:
        return np.mean(self.w_draws, axis=0)

    def sparsity_quantiles(self) -> list[dict]:
        """Per-component 2.5/50/97.5 quantiles of rotator and R-zero percentages."""
        m = self.q * (self.q - 1) // 2
        zmat = np.asarray(self.z_draws, dtype=np.float64)
        rmat = np.asarray(self.r_zero_pct_draws, dtype=np.float64)
        out = []
        for c in range(self.n_components):
            pct_rot = 100.0 * zmat[:, c] / m
            out.append({
                "component": c + 1,
                "pct_nonzero_rotators": list(np.percentile(pct_rot, [2.5, 50, 97.5])),
                "pct_zeros_r": list(np.percentile(rmat[:, c], [2.5, 50, 97.5])),
            })
        return out


def run_mixture_chain(Y: np.ndarray, config: MixtureConfig) -> MixtureSamples:
    """Full mixture posterior simulation with per-iteration relabelling."""
    Y = np.asarray(Y, dtype=np.float64)
    n, q = Y.shape
    C = config.n_components
    rng = np.random.default_rng(config.seed)
    state = init_kmeans(Y, config, rng)
    samples = MixtureSamples(
        q=q, n_components=C, n=n,
        edge_prob_sum=np.zeros((C, q, q)),
        loading_sum=np.zeros((C, q, q)),
        class_counts=np.zeros((n, C)),
    )
    reference_gamma = state.gamma.copy()
    off = ~np.eye(q, dtype=bool)
    for it in range(config.iterations):
        state = mixture_gibbs_iteration(Y, state, config, rng, reference_gamma)
        reference_gamma = state.gamma.copy()
        if it < config.burn_in or (it - config.burn_in) % config.thin:
            continue
        samples.kept += 1
        samples.w_draws.append(state.w.copy())
        samples.mu_draws.append(state.mu.copy())
        samples.psi_draws.append(state.psi.copy())
        samples.class_counts[np.arange(n), state.gamma] += 1.0
        zs, rpct = np.empty(C), np.empty(C)
        for c, model in enumerate(state.models):
            zs[c] = model.z
            R = compose_eigenmatrix(model)
            K = build_precision(model)
            kthr = 1e-9 * np.abs(K).max()
            samples.edge_prob_sum[c] += (np.abs(K) > kthr) & off
            samples.loading_sum[c] += R * np.sqrt(model.eigenvalues)[None, :]
            rthr = 1e-9 * np.abs(R).max()
            rpct[c] = 100.0 * ((np.abs(R) <= rthr) & off).sum() / (q * (q - 1))
        samples.z_draws.append(zs)
        samples.r_zero_pct_draws.append(rpct)
    return samples
