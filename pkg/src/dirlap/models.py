"""Random-graph models tied to the two spectral objectives.

Three families:

* a four-outcome pair model where each unordered node pair is reciprocal,
  forward, backward, or absent with probabilities decaying in the angular
  mismatch (forward and backward edges are *not* independent);
* an independent-edge model whose i -> j probability decays in
  (h_j - h_i - 1)^2, plus a weighted-edge density variant on (0, 1);
* the generalization of the latter to arbitrary nonnegative kernels on
  vector node attributes.

All likelihood arithmetic stays in the log domain so that large decay
rates (gamma up to ~50) do not overflow.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .graphs import DirectedGraph

TWO_PI = 2.0 * np.pi


def _check_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if gamma < 0.0 or not np.isfinite(gamma):
        raise ValueError(f"gamma must be finite and >= 0, got {gamma}")
    return gamma


def _check_rotation(g: float) -> float:
    g = float(g)
    if not 0.0 <= g <= 0.5:
        raise ValueError(f"rotation parameter g={g} outside [0, 1/2]")
    return g


@dataclass(frozen=True)
class PRDRGParams:
    """Angles plus decay rate and rotation for the four-outcome pair model."""

    theta: np.ndarray
    gamma: float
    g: float

    def __post_init__(self):
        object.__setattr__(self, "theta", np.array(self.theta, dtype=float))
        self.theta.setflags(write=False)
        _check_gamma(self.gamma)
        _check_rotation(self.g)


@dataclass(frozen=True)
class TrophicParams:
    """Levels plus decay rate for the independent-edge model."""

    h: np.ndarray
    gamma: float

    def __post_init__(self):
        object.__setattr__(self, "h", np.array(self.h, dtype=float))
        self.h.setflags(write=False)
        _check_gamma(self.gamma)


@dataclass(frozen=True)
class KernelModel:
    """Node attributes in R^d with a nonnegative kernel and decay rate.

    ``kernel(x, y)`` gives the penalty for a directed edge from a node
    with attribute x to one with attribute y; the edge probability is
    1 / (1 + exp(gamma * kernel(x, y))).
    """

    attributes: np.ndarray
    kernel: Callable[[np.ndarray, np.ndarray], float]
    gamma: float

    def __post_init__(self):
        attrs = np.array(self.attributes, dtype=float)
        if attrs.ndim == 1:
            attrs = attrs[:, None]
        if attrs.ndim != 2:
            raise ValueError("attributes must be an (n, d) array")
        object.__setattr__(self, "attributes", attrs)
        self.attributes.setflags(write=False)
        _check_gamma(self.gamma)


# ---------------------------------------------------------------------------
# four-outcome pair model


def _pair_exponent_bases(beta, g: float):
    """gamma-free exponents of the four outcomes, in order
    (reciprocal, forward, backward, none)."""
    beta = np.asarray(beta, dtype=float)
    cos_b = np.cos(beta)
    return np.stack([
        np.zeros_like(beta),
        1.0 - 2.0 * cos_b + np.cos(beta + TWO_PI * g),
        1.0 - 2.0 * cos_b + np.cos(beta - TWO_PI * g),
        2.0 - 2.0 * cos_b,
    ])


def _four_outcome_logprobs(beta, gamma: float, g: float) -> np.ndarray:
    expo = gamma * _pair_exponent_bases(beta, g)
    peak = expo.max(axis=0)
    log_z = peak + np.log(np.exp(expo - peak).sum(axis=0))
    return expo - log_z


def prdrg_pair_probs(theta_i: float, theta_j: float, gamma: float,
                     g: float) -> tuple[float, float, float, float]:
    """Probabilities (reciprocal, forward, backward, none) for one pair.

    With beta = theta_i - theta_j the unnormalized masses are 1,
    exp(gamma*(1 - 2cos(beta) + cos(beta + 2*pi*g))),
    exp(gamma*(1 - 2cos(beta) + cos(beta - 2*pi*g))) and
    exp(gamma*(2 - 2cos(beta))); the four outputs sum to one.
    """
    _check_gamma(gamma)
    _check_rotation(g)
    logp = _four_outcome_logprobs(float(theta_i) - float(theta_j), gamma, g)
    probs = np.exp(logp)
    return tuple(float(p) for p in probs)


def _pair_arrays(graph: DirectedGraph):
    """Upper-triangle pair indices and the observed outcome code per pair
    (0 reciprocal, 1 forward, 2 backward, 3 none)."""
    n = graph.n
    adj = np.zeros((n, n), dtype=bool)
    if graph.edges:
        idx = np.array(graph.edges)
        adj[idx[:, 0], idx[:, 1]] = True
    iu, ju = np.triu_indices(n, k=1)
    fwd = adj[iu, ju]
    bwd = adj[ju, iu]
    code = np.where(fwd & bwd, 0, np.where(fwd, 1, np.where(bwd, 2, 3)))
    return iu, ju, code


def make_prdrg_loglik(graph: DirectedGraph, theta, g: float) -> Callable[[float], float]:
    """Precompute pair terms and return gamma -> log-likelihood.

    Useful when the likelihood is probed at many decay rates for fixed
    angles, as in the gamma fit.
    """
    if graph.is_weighted:
        raise ValueError("the pair model is defined for unweighted graphs")
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (graph.n,):
        raise ValueError(f"theta has length {theta.size}, expected {graph.n}")
    g = _check_rotation(g)
    iu, ju, code = _pair_arrays(graph)
    bases = _pair_exponent_bases(theta[iu] - theta[ju], g)
    chosen = bases[code, np.arange(len(code))]

    def loglik(gamma: float) -> float:
        gamma = _check_gamma(gamma)
        expo = gamma * bases
        peak = expo.max(axis=0)
        log_z = peak + np.log(np.exp(expo - peak).sum(axis=0))
        return float(np.sum(gamma * chosen - log_z))

    return loglik


def prdrg_loglik(graph: DirectedGraph, params: PRDRGParams) -> float:
    """Log-likelihood of the graph: one four-outcome term per unordered pair."""
    return make_prdrg_loglik(graph, params.theta, params.g)(params.gamma)


def prdrg_sample(params: PRDRGParams, seed) -> DirectedGraph:
    """Draw a graph: one categorical outcome per unordered pair.

    Deterministic for a given seed; pairs are consumed in a fixed
    row-major order.
    """
    theta = params.theta
    n = len(theta)
    iu, ju = np.triu_indices(n, k=1)
    logp = _four_outcome_logprobs(theta[iu] - theta[ju], params.gamma, params.g)
    cum = np.cumsum(np.exp(logp), axis=0)
    u = np.random.default_rng(seed).random(len(iu))
    outcome = (u[None, :] >= cum[:3, :]).sum(axis=0)
    edges: list[tuple[int, int]] = []
    for k in np.flatnonzero(outcome == 0):
        edges.append((int(iu[k]), int(ju[k])))
        edges.append((int(ju[k]), int(iu[k])))
    for k in np.flatnonzero(outcome == 1):
        edges.append((int(iu[k]), int(ju[k])))
    for k in np.flatnonzero(outcome == 2):
        edges.append((int(ju[k]), int(iu[k])))
    return DirectedGraph(n, tuple(edges))


def prdrg_expected_edges(theta, gamma: float, g: float) -> float:
    """Expected directed-edge count: sum over pairs of 2f + q + l."""
    theta = np.asarray(theta, dtype=float)
    iu, ju = np.triu_indices(len(theta), k=1)
    probs = np.exp(_four_outcome_logprobs(theta[iu] - theta[ju],
                                          _check_gamma(gamma), _check_rotation(g)))
    return float(np.sum(2.0 * probs[0] + probs[1] + probs[2]))


# ---------------------------------------------------------------------------
# independent-edge level model


def trophic_edge_prob(h_i, h_j, gamma: float):
    """P(edge i -> j) = 1 / (1 + exp(gamma * (h_j - h_i - 1)^2)).

    Equals 1/2 exactly when the edge climbs one level, and
    1/(1 + exp(gamma)) within a level.
    """
    x = _check_gamma(gamma) * (np.asarray(h_j, dtype=float)
                               - np.asarray(h_i, dtype=float) - 1.0) ** 2
    e = np.exp(-x)
    out = e / (1.0 + e)
    return float(out) if np.isscalar(h_i) and np.isscalar(h_j) else out


def _level_penalties(graph: DirectedGraph, h):
    """Off-diagonal (h_j - h_i - 1)^2 values and the edge indicator,
    flattened in row-major order."""
    h = np.asarray(h, dtype=float)
    if h.shape != (graph.n,):
        raise ValueError(f"h has length {h.size}, expected {graph.n}")
    n = graph.n
    adj = np.zeros((n, n), dtype=bool)
    if graph.edges:
        idx = np.array(graph.edges)
        adj[idx[:, 0], idx[:, 1]] = True
    penalty = (h[None, :] - h[:, None] - 1.0) ** 2
    off = ~np.eye(n, dtype=bool)
    return penalty[off], adj[off]


def make_trophic_loglik(graph: DirectedGraph, h) -> Callable[[float], float]:
    """Precompute pair terms and return gamma -> log-likelihood."""
    if graph.is_weighted:
        raise ValueError("the Bernoulli level model is defined for "
                         "unweighted graphs; see weighted_trophic_logdensity")
    penalties, present = _level_penalties(graph, h)

    def loglik(gamma: float) -> float:
        x = _check_gamma(gamma) * penalties
        log_absent = -np.log1p(np.exp(-x))
        log_present = log_absent - x
        return float(np.sum(np.where(present, log_present, log_absent)))

    return loglik


def trophic_loglik(graph: DirectedGraph, params: TrophicParams) -> float:
    """Bernoulli log-likelihood over all ordered pairs i != j."""
    return make_trophic_loglik(graph, params.h)(params.gamma)


def trophic_sample(params: TrophicParams, seed) -> DirectedGraph:
    """Draw a graph with one independent Bernoulli edge per ordered pair."""
    h = params.h
    n = len(h)
    x = params.gamma * (h[None, :] - h[:, None] - 1.0) ** 2
    e = np.exp(-x)
    prob = e / (1.0 + e)
    u = np.random.default_rng(seed).random((n, n))
    adj = (u < prob) & ~np.eye(n, dtype=bool)
    edges = tuple((int(i), int(j)) for i, j in np.argwhere(adj))
    return DirectedGraph(n, edges)


def trophic_expected_edges(h, gamma: float) -> float:
    """Expected directed-edge count: sum of edge probabilities over i != j."""
    h = np.asarray(h, dtype=float)
    x = _check_gamma(gamma) * (h[None, :] - h[:, None] - 1.0) ** 2
    e = np.exp(-x)
    prob = e / (1.0 + e)
    np.fill_diagonal(prob, 0.0)
    return float(prob.sum())


def _log_weight_normalizer(x: np.ndarray) -> np.ndarray:
    """log of (1 - exp(-x)) / x for x >= 0, with the x -> 0 limit of 0.

    Uses expm1 so that small x suffers no cancellation: for x = 1e-12 the
    result is log(1 - x/2 + O(x^2)) to full precision.
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.log(-np.expm1(-x[pos])) - np.log(x[pos])
    return out


def weighted_trophic_logdensity(graph: DirectedGraph, params: TrophicParams) -> float:
    """Log-density of the observed edge weights under the level model.

    Each realized weight w on edge i -> j has density
    exp(-gamma * w * p) / Z on (0, 1), with p = (h_j - h_i - 1)^2 and
    Z = (1 - exp(-gamma * p)) / (gamma * p).  Pairs without an edge are
    outside this model's sample space and contribute nothing.
    """
    if not graph.is_weighted:
        raise ValueError("weighted_trophic_logdensity needs a weighted graph")
    h = np.asarray(params.h, dtype=float)
    if h.shape != (graph.n,):
        raise ValueError(f"h has length {h.size}, expected {graph.n}")
    if not graph.edges:
        return 0.0
    idx = np.array(graph.edges)
    w = np.array(graph.weights)
    penalty = (h[idx[:, 1]] - h[idx[:, 0]] - 1.0) ** 2
    x = params.gamma * penalty
    return float(np.sum(-params.gamma * w * penalty - _log_weight_normalizer(x)))


# ---------------------------------------------------------------------------
# generalized kernel model


def kernel_loglik(graph: DirectedGraph, model: KernelModel) -> float:
    """Bernoulli log-likelihood with edge probability 1/(1 + exp(gamma*I)).

    ``I`` is the model kernel evaluated on the attribute pair of each
    ordered node pair.  With scalar attributes and the kernel
    (y - x - 1)^2 this reproduces trophic_loglik exactly.
    """
    if graph.is_weighted:
        raise ValueError("the kernel model is defined for unweighted graphs")
    attrs = model.attributes
    if attrs.shape[0] != graph.n:
        raise ValueError(f"{attrs.shape[0]} attribute rows for {graph.n} nodes")
    n = graph.n
    penalty = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            value = float(model.kernel(attrs[i], attrs[j]))
            if value < 0.0:
                raise ValueError(f"kernel is negative ({value}) on pair ({i}, {j})")
            penalty[i, j] = value
    adj = np.zeros((n, n), dtype=bool)
    if graph.edges:
        idx = np.array(graph.edges)
        adj[idx[:, 0], idx[:, 1]] = True
    off = ~np.eye(n, dtype=bool)
    x = model.gamma * penalty[off]
    log_absent = -np.log1p(np.exp(-x))
    log_present = log_absent - x
    return float(np.sum(np.where(adj[off], log_present, log_absent)))


# ---------------------------------------------------------------------------
# synthetic attribute generators


def gen_clustered_angles(clusters: int, cluster_size: int, noise: float, seed) -> np.ndarray:
    """Angles in ``clusters`` evenly spaced groups of ``cluster_size``.

    Node i in group l gets 2*pi*(l-1)/clusters plus uniform noise on
    (-noise, noise).  Angles are not wrapped, so the group ranges are
    exactly [center - noise, center + noise].
    """
    if clusters < 1 or cluster_size < 1:
        raise ValueError("clusters and cluster_size must be >= 1")
    if noise < 0:
        raise ValueError("noise half-width must be >= 0")
    rng = np.random.default_rng(seed)
    base = np.repeat(TWO_PI * np.arange(clusters) / clusters, cluster_size)
    return base + rng.uniform(-noise, noise, clusters * cluster_size)


def gen_trophic_levels(clusters: int, cluster_size: int, noise: float, seed) -> np.ndarray:
    """Levels 1..clusters in groups of ``cluster_size`` plus uniform noise."""
    if clusters < 1 or cluster_size < 1:
        raise ValueError("clusters and cluster_size must be >= 1")
    if noise < 0:
        raise ValueError("noise half-width must be >= 0")
    rng = np.random.default_rng(seed)
    base = np.repeat(np.arange(1, clusters + 1, dtype=float), cluster_size)
    return base + rng.uniform(-noise, noise, clusters * cluster_size)
