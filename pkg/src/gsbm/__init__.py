"""Bayesian stochastic block models with general edge-weight distributions.

Fits block structure, the number of blocks, and edge-weight parameters
jointly by a split-merge reversible-jump MCMC sampler that works for
non-conjugate edge models, alongside exact enumeration oracles for small
instances and convergence diagnostics for assessing runs.
"""

from gsbm.blocks import (
    BlockAssignment,
    BlockParams,
    SamplerState,
    block_sizes,
    empty_blocks,
    relabel_contiguous,
    theta_for_edge,
)
from gsbm.diagnostics import (
    MatchedTrace,
    ParameterSummary,
    effective_sample_size,
    gelman_rubin,
    match_labels,
    modal_assignment,
    pad_trace,
    posterior_pairs,
    summarize_params,
    summary_series,
)
from gsbm.dma import (
    DmaPrior,
    conditional_log_prob,
    conditional_log_probs,
    log_joint_prior,
    log_prior_k,
    log_prior_z,
)
from gsbm.generate import generate_network
from gsbm.models import (
    Bernoulli,
    EdgeModel,
    MatchingFunction,
    NegativeBinomial,
    Normal,
    Poisson,
    log_likelihood,
    log_likelihood_node,
    make_model,
    node_log_likelihoods,
)
from gsbm.network import Network, edge_indices
from gsbm.oracle import ExactPosterior, enumerate_posterior, exact_pair_matrix
from gsbm.sampler import (
    MoveOutcome,
    SamplerConfig,
    empty_block_move,
    gibbs_log_probs,
    gibbs_sweep,
    implied_u,
    initial_state,
    log_jacobian_split,
    log_posterior,
    merge_params,
    propose_merge,
    propose_split,
    run_chain,
    rw_update_params,
    sequential_allocation,
    split_params,
)
from gsbm.trace import TraceStore

__version__ = "0.1.0"
