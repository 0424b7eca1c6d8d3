"""Dirichlet-multinomial allocation prior on the block count and labels.

The block count gets a shifted Poisson prior, K - 1 ~ Poisson(delta).
Given K, labels follow the Dirichlet-multinomial obtained by integrating
a symmetric Dirichlet(gamma) out of the multinomial allocation, so the
mixing weights never need a runtime representation.  Empty blocks enter
the marginal with their Gamma(gamma + 0) factors verbatim, which is what
keeps the add/delete-empty-block ratios well defined.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from gsbm.blocks import BlockAssignment, block_sizes


@dataclass(frozen=True)
class DmaPrior:
    gamma: float
    delta: float

    def __post_init__(self):
        if not (np.isfinite(self.gamma) and self.gamma > 0):
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not (np.isfinite(self.delta) and self.delta > 0):
            raise ValueError(f"delta must be positive, got {self.delta}")


def log_prior_k(prior: DmaPrior, k: int) -> float:
    """Log pmf of the block count: Poisson(delta) shifted to start at 1."""
    if k < 1:
        raise ValueError("block count must be at least 1")
    return float((k - 1) * np.log(prior.delta) - prior.delta - gammaln(k))


def log_prior_z(prior: DmaPrior, assignment: BlockAssignment) -> float:
    """Log Dirichlet-multinomial marginal of a label vector given K."""
    g = prior.gamma
    k = assignment.k
    n = assignment.n_nodes
    sizes = block_sizes(assignment)
    return float(
        gammaln(k * g)
        - k * gammaln(g)
        + gammaln(g + sizes).sum()
        - gammaln(k * g + n)
    )


def conditional_log_probs(prior: DmaPrior, assignment: BlockAssignment, i: int) -> np.ndarray:
    """Log conditional membership probabilities of node i over all K blocks.

    Entry l is log[(gamma + N_l^{-i}) / (K gamma + N - 1)] where N_l^{-i}
    counts block l's members excluding node i; the entries exponentiate and
    sum to one.
    """
    sizes = block_sizes(assignment).astype(float)
    sizes[assignment.labels[i]] -= 1.0
    g = prior.gamma
    n = assignment.n_nodes
    return np.log(g + sizes) - np.log(assignment.k * g + n - 1.0)


def conditional_log_prob(
    prior: DmaPrior, assignment: BlockAssignment, i: int, target_block: int
) -> float:
    if not 0 <= target_block < assignment.k:
        raise ValueError("target block out of range")
    return float(conditional_log_probs(prior, assignment, i)[target_block])


def log_joint_prior(prior: DmaPrior, assignment: BlockAssignment) -> float:
    """Joint log prior of (K, Z)."""
    return log_prior_k(prior, assignment.k) + log_prior_z(prior, assignment)
