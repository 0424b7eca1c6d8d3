"""Brute-force exact posterior over block structures for small instances.

Restricted to the conjugate families (Bernoulli-Beta and Poisson-Gamma)
where the block parameters integrate out in closed form.  Label vectors
that share a set partition also share their prior and marginal
likelihood, so the enumeration walks the set partitions and weights each
by the number of label vectors mapping onto it, covering empty blocks up
to ``k_max``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from gsbm.dma import DmaPrior, log_prior_k
from gsbm.models import Bernoulli, EdgeModel, Poisson
from gsbm.network import Network, edge_indices

MAX_NODES = 8


@dataclass(frozen=True)
class ExactEntry:
    k: int
    partition: tuple  # tuple of tuples of node indices, ordered by smallest member
    prob: float


@dataclass
class ExactPosterior:
    """Exhaustive posterior over (K, canonical partition)."""

    n_nodes: int
    entries: list
    k_max: int
    truncation_tail: float  # prior mass on K > k_max, excluded by the enumeration

    def k_marginal(self) -> np.ndarray:
        out = np.zeros(self.k_max + 1)
        for e in self.entries:
            out[e.k] += e.prob
        return out

    def partition_marginal(self) -> dict:
        out = {}
        for e in self.entries:
            out[e.partition] = out.get(e.partition, 0.0) + e.prob
        return out


def set_partitions(n: int):
    """All set partitions of range(n), blocks ordered by smallest member."""
    groups: list = []

    def rec(i):
        if i == n:
            yield tuple(tuple(g) for g in groups)
            return
        for g in groups:
            g.append(i)
            yield from rec(i + 1)
            g.pop()
        groups.append([i])
        yield from rec(i + 1)
        groups.pop()

    yield from rec(0)


def _log_marginal(model: EdgeModel, w: np.ndarray) -> float:
    """Closed-form log marginal likelihood of one parameter's edge group."""
    n_e = w.size
    if n_e == 0:
        return 0.0
    total = float(w.sum())
    if isinstance(model, Bernoulli):
        a, b = model.beta_a, model.beta_b
        return float(
            gammaln(a + total)
            + gammaln(b + n_e - total)
            - gammaln(a + b + n_e)
            - (gammaln(a) + gammaln(b) - gammaln(a + b))
        )
    if isinstance(model, Poisson):
        a, b = model.gamma_shape, model.gamma_rate
        return float(
            gammaln(a + total)
            - gammaln(a)
            + a * np.log(b)
            - (a + total) * np.log(b + n_e)
            - gammaln(w + 1.0).sum()
        )
    raise ValueError(
        f"exact enumeration needs a conjugate family, not {model.name!r}"
    )


def enumerate_posterior(network: Network, model: EdgeModel, prior: DmaPrior,
                        k_max: int | None = None) -> ExactPosterior:
    """Exact posterior over (K, partition), K ranging over 1..k_max.

    Every label vector in {1..K}^N is covered: a partition with B occupied
    blocks accounts for K!/(K-B)! label vectors, all with identical prior
    and marginal likelihood.  Probabilities are renormalised over the
    enumerated range; the prior mass beyond k_max is reported as
    ``truncation_tail``.
    """
    n = network.n_nodes
    if n > MAX_NODES:
        raise ValueError(f"exact enumeration is limited to {MAX_NODES} nodes, got {n}")
    if k_max is None:
        k_max = n
    if not 1 <= k_max <= n:
        raise ValueError("k_max must lie in 1..n_nodes")
    model.check_weights(network.weights)

    rows, cols = edge_indices(network)
    w_all = network.weights[rows, cols]
    g = prior.gamma
    log_k = {k: log_prior_k(prior, k) for k in range(1, k_max + 1)}

    keys = []
    log_weights = []
    for part in set_partitions(n):
        b = len(part)
        if b > k_max:
            continue
        part_id = np.empty(n, dtype=np.int64)
        for idx, blk in enumerate(part):
            part_id[list(blk)] = idx
        same = part_id[rows] == part_id[cols]
        log_marg = _log_marginal(model, w_all[~same])
        for idx in range(b):
            within = same & (part_id[rows] == idx)
            log_marg += _log_marginal(model, w_all[within])
        sizes = np.array([len(blk) for blk in part], dtype=float)
        for k in range(b, k_max + 1):
            # Dirichlet-multinomial marginal: empty-block Gamma(gamma)
            # factors cancel against the normaliser
            log_dma = (
                gammaln(k * g)
                - b * gammaln(g)
                + gammaln(g + sizes).sum()
                - gammaln(k * g + n)
            )
            log_labelings = gammaln(k + 1.0) - gammaln(k - b + 1.0)
            keys.append((k, part))
            log_weights.append(log_k[k] + log_dma + log_labelings + log_marg)

    log_weights = np.array(log_weights)
    probs = np.exp(log_weights - logsumexp(log_weights))
    entries = [ExactEntry(k, part, float(p)) for (k, part), p in zip(keys, probs)]
    tail = float(1.0 - sum(math.exp(v) for v in log_k.values()))
    return ExactPosterior(n_nodes=n, entries=entries, k_max=k_max,
                          truncation_tail=max(tail, 0.0))


def exact_pair_matrix(posterior: ExactPosterior) -> np.ndarray:
    """Posterior co-membership probability for every node pair."""
    n = posterior.n_nodes
    pairs = np.zeros((n, n))
    for e in posterior.entries:
        for blk in e.partition:
            idx = np.array(blk)
            pairs[np.ix_(idx, idx)] += e.prob
    return pairs
