"""Split-merge reversible-jump sampler for block structure and parameters.

One iteration applies, in order: a random-walk refresh of every parameter
vector on its matched scale, one trans-dimensional split-or-merge
proposal, one add-or-delete-empty-block proposal, and a full Gibbs
reassignment sweep over the nodes.  All acceptance arithmetic happens in
natural logs and is capped at zero before the log-uniform comparison.

Split/merge bookkeeping
-----------------------
A merge of blocks (k, l) with weight lam proposes, on the matched scale,
``m(theta') = lam m(theta_k) + (1 - lam) m(theta_l)``; a split inverts it
with an auxiliary vector u drawn Normal(0, sigma_u^2) per component:
``m(theta_a) = (m(theta') + u) / (2 lam)`` and
``m(theta_b) = (m(theta') - u) / (2 (1 - lam))``.  The triple
(theta', u, lam) therefore matches (theta_a, theta_b, lam) in dimension,
and the absolute Jacobian of the split map (theta', u) -> (theta_a,
theta_b) at fixed lam factorises componentwise as

    m'(theta') / (m'(theta_a) m'(theta_b) 2 lam (1 - lam)).

The lam draws are Uniform(0, 1) in both directions, so their unit
densities cancel and never appear in the log-acceptance arithmetic; the
same holds for the random allocation permutation, which is drawn
uniformly in both the forward split and the reverse-merge scoring.

Label bookkeeping is arranged so that every proposal has exactly one
reverse proposal restoring the full labelled state, which keeps the
chain in detailed balance without appealing to relabelling arguments:

* A split chooses the block uniformly and inserts the second half at a
  uniformly drawn position among the K+1 slots; the matching merge draws
  an ordered pair and leaves the merged block at the first index while
  the second's slot closes up.  The block-choice (1/K) and slot-choice
  (1/(K+1)) probabilities then cancel against the ordered-pair
  probability 1/((K+1)K), so neither appears in the acceptance ratio.
* Adding an empty block appends it at the end and the delete proposal
  targets the trailing block only, making add/delete exact inverses at
  the price of an (N_empty + 1) factor in the add ratio and its
  reciprocal in the delete ratio.

Both conventions are validated against brute-force enumeration in the
test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gsbm.blocks import (
    BlockAssignment,
    BlockParams,
    SamplerState,
    block_sizes,
    empty_blocks,
    relabel_contiguous,
)
from gsbm.dma import DmaPrior, conditional_log_probs, log_joint_prior
from gsbm.models import (
    EdgeModel,
    MatchingFunction,
    _normal_logpdf,
    log_likelihood,
    node_log_likelihoods,
)
from gsbm.network import Network, edge_indices
from gsbm.trace import TraceStore

UNASSIGNED, SIDE_A, SIDE_B, OUTSIDE = -1, 0, 1, 2

INIT_MODES = ("prior", "one-block", "singletons")


@dataclass
class SamplerConfig:
    """Tuning knobs and run length for one chain."""

    iterations: int
    burn_in: int | None = None
    sigma_u: float = 1.0
    rw_sd: float = 0.1
    nu: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be at least 1")
        if self.burn_in is None:
            self.burn_in = self.iterations // 2
        if not 0 <= self.burn_in < self.iterations:
            raise ValueError("burn_in must satisfy 0 <= burn_in < iterations")
        for name in ("sigma_u", "rw_sd", "nu"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive, got {v}")


@dataclass(frozen=True)
class MoveOutcome:
    """Accept/reject record of a single proposal."""

    move_kind: str
    accepted: bool
    log_accept_prob: float  # capped at 0


def _logsumexp(v: np.ndarray) -> float:
    m = v.max()
    if not np.isfinite(m):
        return m
    return m + np.log(np.exp(v - m).sum())


def _accept(log_ratio: float, rng) -> tuple[bool, float]:
    capped = min(float(log_ratio), 0.0)
    if np.isnan(capped):
        capped = -np.inf
    return bool(np.log(rng.random()) < capped), capped


def _categorical(log_probs: np.ndarray, rng) -> int:
    m = log_probs.max()
    if not np.isfinite(m):
        raise ValueError("no candidate has positive probability")
    cdf = np.cumsum(np.exp(log_probs - m))
    return int(min(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"),
                   log_probs.size - 1))


def log_posterior(state: SamplerState, network: Network, model: EdgeModel,
                  prior: DmaPrior) -> float:
    """Unnormalised log posterior of (K, Z, theta)."""
    return (
        log_likelihood(network, state.assignment, state.params, model)
        + log_joint_prior(prior, state.assignment)
        + float(model.prior_log_density(state.theta0))
        + float(model.prior_log_density(state.theta).sum())
    )


# -- parameter random walk ---------------------------------------------------

def rw_update_params(state, network, model, rng, rw_sd=0.1):
    """Metropolis pass over theta0 and every block parameter vector.

    Proposals are Gaussian steps on the matched scale; the acceptance
    ratio is evaluated on the original scale, so it carries the
    change-of-variable derivative of the inverse transform alongside the
    likelihood of the governed edges and the prior.
    """
    state = state.copy()
    mf = model.matching
    rows, cols = edge_indices(network)
    w = network.weights[rows, cols]
    li = state.labels[rows]
    lj = state.labels[cols]
    same = li == lj
    outcomes = []

    def score(governed, th):
        return (
            float(model.log_density(governed, th, check=False).sum())
            + float(model.prior_log_density(th))
            - float(mf.log_grad(th))
        )

    for b in range(-1, state.k):
        if b < 0:
            governed = w[~same]
            current = state.theta0
        else:
            governed = w[same & (li == b)]
            current = state.theta[b]
        step = rng.normal(0.0, rw_sd, size=model.p)
        proposal = mf.unmatch(mf.match(current) + step)
        if model.in_interior(proposal):
            ok, capped = _accept(score(governed, proposal) - score(governed, current), rng)
        else:
            ok, capped = False, -np.inf
        if ok:
            if b < 0:
                state.params.theta0 = proposal
            else:
                state.params.theta[b] = proposal
        outcomes.append(MoveOutcome("rw", ok, capped))
    return state, outcomes


# -- split/merge parameter algebra -------------------------------------------

def merge_params(theta_k, theta_l, lam: float, mf: MatchingFunction) -> np.ndarray:
    """Weighted mean of two parameter vectors on the matched scale."""
    if not 0.0 < lam < 1.0:
        raise ValueError("lam must lie strictly inside (0, 1)")
    return mf.unmatch(lam * mf.match(theta_k) + (1.0 - lam) * mf.match(theta_l))


def split_params(theta_merged, lam: float, u, mf: MatchingFunction):
    """Invert :func:`merge_params` given the auxiliary difference vector u."""
    if not 0.0 < lam < 1.0:
        raise ValueError("lam must lie strictly inside (0, 1)")
    y = mf.match(theta_merged)
    u = np.asarray(u, dtype=float)
    return mf.unmatch((y + u) / (2.0 * lam)), mf.unmatch((y - u) / (2.0 * (1.0 - lam)))


def implied_u(theta_k, theta_l, lam: float, mf: MatchingFunction) -> np.ndarray:
    """Auxiliary vector the reverse split would need to reproduce the pair."""
    return lam * mf.match(theta_k) - (1.0 - lam) * mf.match(theta_l)


def log_jacobian_split(theta_k, theta_l, theta_merged, lam: float,
                       mf: MatchingFunction, p: int | None = None) -> float:
    """Log absolute Jacobian of the split map (theta', u) -> (theta_k, theta_l).

    Componentwise the determinant is m'(theta') / (m'(theta_k) m'(theta_l)
    2 lam (1 - lam)); the log_grad terms are the log products of the
    matching derivatives over the p components.
    """
    if p is None:
        p = mf.p
    return float(
        mf.log_grad(theta_merged)
        - mf.log_grad(theta_k)
        - mf.log_grad(theta_l)
        - p * np.log(2.0 * lam * (1.0 - lam))
    )


# -- sequential allocation -----------------------------------------------------

def sequential_allocation(network, model, theta_a, theta_b, theta0, order,
                          alloc, rng=None, fixed_sides=None):
    """Assign the nodes in ``order`` one at a time to one of two candidate
    blocks, each with probability proportional to the likelihood of the
    node's edges into already-assigned nodes.

    ``alloc`` codes the view at the start: SIDE_A / SIDE_B for settled
    members of the two candidates, OUTSIDE for nodes whose edges to either
    candidate are governed by theta0, and UNASSIGNED for exactly the nodes
    in ``order``.  With ``fixed_sides`` given, the same scheme scores a
    known allocation instead of drawing one (replaying a sampled
    allocation reproduces its log probability exactly).

    Returns the side codes of the nodes in ``order`` and the total log
    proposal probability; an empty ``order`` returns log probability 0.
    """
    if (rng is None) == (fixed_sides is None):
        raise ValueError("pass exactly one of rng (sampling) or fixed_sides (scoring)")
    alloc = np.asarray(alloc, dtype=np.int64).copy()
    order = np.asarray(order, dtype=np.int64)
    weights = network.weights
    m = order.size
    sides = np.empty(m, dtype=np.int64)
    if m == 0:
        return sides, 0.0
    # densities of every potentially relevant edge under each candidate
    # parameter, computed in one pass per direction
    blocks = [weights[order, :]]
    if network.directed:
        blocks.append(weights[:, order].T)
    dens = [
        (
            model.log_density(w, theta_a, check=False),
            model.log_density(w, theta_b, check=False),
            model.log_density(w, theta0, check=False),
        )
        for w in blocks
    ]
    if network.self_loops:
        w_self = weights[order, order]
        self_a = np.atleast_1d(model.log_density(w_self, theta_a, check=False))
        self_b = np.atleast_1d(model.log_density(w_self, theta_b, check=False))
    log_q = 0.0
    for t in range(m):
        i = order[t]
        assigned = np.flatnonzero(alloc != UNASSIGNED)
        ll = np.zeros(2)
        if assigned.size:
            on_a = alloc[assigned] == SIDE_A
            on_b = alloc[assigned] == SIDE_B
            for da, db, d0 in dens:
                base = d0[t, assigned]
                ll[0] += np.where(on_a, da[t, assigned], base).sum()
                ll[1] += np.where(on_b, db[t, assigned], base).sum()
        if network.self_loops:
            ll[0] += self_a[t]
            ll[1] += self_b[t]
        norm = np.logaddexp(ll[0], ll[1])
        if np.isfinite(norm):
            log_pa = ll[0] - norm
            log_pb = ll[1] - norm
        else:
            # both sides give zero density; allocate by a fair coin
            log_pa = log_pb = -np.log(2.0)
        if fixed_sides is None:
            side = SIDE_A if np.log(rng.random()) < log_pa else SIDE_B
        else:
            side = int(fixed_sides[t])
        log_q += log_pa if side == SIDE_A else log_pb
        alloc[i] = side
        sides[t] = side
    return sides, float(log_q)


# -- trans-dimensional moves ---------------------------------------------------

def _member_pair_indices(network, members):
    """Index arrays of every modelled edge with both endpoints in ``members``."""
    m = np.asarray(members)
    if network.directed:
        a, b = np.nonzero(~np.eye(m.size, dtype=bool))
    else:
        a, b = np.triu_indices(m.size, k=1)
    rows, cols = m[a], m[b]
    if network.self_loops:
        rows = np.concatenate([rows, m])
        cols = np.concatenate([cols, m])
    return rows, cols


def _group_log_likelihood(network, model, rows, cols, side_of, theta_sides, theta0):
    """Log-likelihood of the given edges under two-sided block labels.

    ``side_of`` maps each node to 0/1; edges whose endpoints share a side
    use that side's row of ``theta_sides``, the rest use theta0.
    """
    if rows.size == 0:
        return 0.0
    w = network.weights[rows, cols]
    si = side_of[rows]
    sj = side_of[cols]
    same = si == sj
    th = np.where(same[:, None], theta_sides[si], theta0)
    return float(model.log_density(w, th, check=False).sum())


def _split_move(state, network, model, prior, config, chosen, lam, u, order, slot, rng):
    """Deterministic part of a split given its random inputs.

    The first half keeps the split block's identity, the second half is
    inserted at label ``slot`` (0..K), shifting higher labels up by one.
    Returns (proposed state or None, uncapped log acceptance ratio); the
    proposal is void (None) when the split parameters leave the usable
    parameter space, which the caller treats as an immediate rejection.
    """
    k = state.k
    mf = model.matching
    theta_pre = state.theta[chosen]
    theta_a, theta_b = split_params(theta_pre, lam, u, mf)
    if not (model.in_interior(theta_a) and model.in_interior(theta_b)):
        return None, -np.inf
    alloc = np.full(network.n_nodes, OUTSIDE, dtype=np.int64)
    alloc[order] = UNASSIGNED
    sides, log_q = sequential_allocation(
        network, model, theta_a, theta_b, state.theta0, order, alloc, rng=rng
    )
    labels = state.labels.copy()
    labels[labels >= slot] += 1
    keep = chosen + 1 if slot <= chosen else chosen
    labels[order[sides == SIDE_A]] = keep
    labels[order[sides == SIDE_B]] = slot
    theta = np.insert(state.theta, slot, theta_b, axis=0)
    theta[keep] = theta_a
    proposed = SamplerState(
        BlockAssignment(labels, k + 1),
        BlockParams(state.theta0.copy(), theta),
        state.iteration,
    )
    # only edges inside the split block change their governing parameter
    rows, cols = _member_pair_indices(network, order)
    side_of = np.zeros(network.n_nodes, dtype=np.int64)
    side_of[order] = sides
    theta_sides = np.vstack([theta_a[None, :], theta_b[None, :]])
    delta_lik = _group_log_likelihood(
        network, model, rows, cols, side_of, theta_sides, state.theta0
    ) - (
        float(model.log_density(network.weights[rows, cols], theta_pre, check=False).sum())
        if rows.size else 0.0
    )
    delta_theta_prior = float(
        model.prior_log_density(theta_a)
        + model.prior_log_density(theta_b)
        - model.prior_log_density(theta_pre)
    )
    log_ratio = (
        delta_lik
        + log_joint_prior(prior, proposed.assignment)
        - log_joint_prior(prior, state.assignment)
        + delta_theta_prior
        - (np.log(2.0) if k == 1 else 0.0)      # move-choice ratio 1/(1 + [K=1])
        - float(_normal_logpdf(u, 0.0, config.sigma_u).sum())
        - log_q
        + log_jacobian_split(theta_a, theta_b, theta_pre, lam, mf)
    )
    return proposed, log_ratio


def _merge_move(state, network, model, prior, config, first, second, lam, order):
    """Deterministic part of a merge of blocks (first, second) given lam.

    The merged block takes ``first``'s label and ``second``'s slot closes
    up, exactly undoing a split that kept ``first`` and inserted its other
    half at ``second``.  The reverse split is scored with the supplied
    permutation; its auxiliary vector is implied by the matched-scale
    difference of the two block parameters.
    """
    k = state.k
    mf = model.matching
    theta_merged = merge_params(state.theta[first], state.theta[second], lam, mf)
    if not model.in_interior(theta_merged):
        return None, -np.inf
    u = implied_u(state.theta[first], state.theta[second], lam, mf)
    alloc = np.full(network.n_nodes, OUTSIDE, dtype=np.int64)
    alloc[order] = UNASSIGNED
    fixed = np.where(state.labels[order] == first, SIDE_A, SIDE_B)
    _, log_q = sequential_allocation(
        network, model, state.theta[first], state.theta[second], state.theta0,
        order, alloc, fixed_sides=fixed,
    )
    labels = state.labels.copy()
    labels[(labels == first) | (labels == second)] = first
    theta = state.theta.copy()
    theta[first] = theta_merged
    interim = SamplerState(
        BlockAssignment(labels, k),
        BlockParams(state.theta0.copy(), theta),
        state.iteration,
    )
    proposed = relabel_contiguous(interim, second)
    # only edges inside the merged pair change their governing parameter
    rows, cols = _member_pair_indices(network, order)
    side_of = np.zeros(network.n_nodes, dtype=np.int64)
    side_of[order] = fixed
    theta_sides = np.vstack([state.theta[first][None, :], state.theta[second][None, :]])
    delta_lik = (
        float(model.log_density(network.weights[rows, cols], theta_merged, check=False).sum())
        if rows.size else 0.0
    ) - _group_log_likelihood(
        network, model, rows, cols, side_of, theta_sides, state.theta0
    )
    delta_theta_prior = float(
        model.prior_log_density(theta_merged)
        - model.prior_log_density(state.theta[first])
        - model.prior_log_density(state.theta[second])
    )
    log_ratio = (
        delta_lik
        + log_joint_prior(prior, proposed.assignment)
        - log_joint_prior(prior, state.assignment)
        + delta_theta_prior
        + (np.log(2.0) if k == 2 else 0.0)      # move-choice ratio (1 + [K=2])
        + float(_normal_logpdf(u, 0.0, config.sigma_u).sum())
        + log_q
        - log_jacobian_split(state.theta[first], state.theta[second], theta_merged, lam, mf)
    )
    return proposed, log_ratio


def propose_split(state, network, model, prior, config, rng):
    """Split a uniformly chosen block (empty or singleton blocks included)
    and reallocate its members sequentially between the two halves."""
    chosen = int(rng.integers(state.k))
    lam = float(rng.uniform())
    u = rng.normal(0.0, config.sigma_u, size=model.p)
    members = np.flatnonzero(state.labels == chosen)
    order = rng.permutation(members)
    slot = int(rng.integers(state.k + 1))
    proposed, log_ratio = _split_move(
        state, network, model, prior, config, chosen, lam, u, order, slot, rng
    )
    if proposed is None:
        return state, MoveOutcome("split", False, -np.inf)
    ok, capped = _accept(log_ratio, rng)
    return (proposed if ok else state), MoveOutcome("split", ok, capped)


def propose_merge(state, network, model, prior, config, rng):
    """Merge a uniformly chosen unordered pair of blocks into one."""
    if state.k < 2:
        raise ValueError("merge needs at least two blocks")
    pair = rng.choice(state.k, size=2, replace=False)
    first, second = int(pair[0]), int(pair[1])
    lam = float(rng.uniform())
    members = np.flatnonzero((state.labels == first) | (state.labels == second))
    order = rng.permutation(members)
    proposed, log_ratio = _merge_move(
        state, network, model, prior, config, first, second, lam, order
    )
    if proposed is None:
        return state, MoveOutcome("merge", False, -np.inf)
    ok, capped = _accept(log_ratio, rng)
    return (proposed if ok else state), MoveOutcome("merge", ok, capped)


# -- empty-block moves ---------------------------------------------------------

def _add_log_ratio(state, prior, nu):
    n_empty = empty_blocks(state.assignment).size
    with_extra = BlockAssignment(state.labels.copy(), state.k + 1)
    return (
        log_joint_prior(prior, with_extra)
        - log_joint_prior(prior, state.assignment)
        + np.log((n_empty + 1.0) * (nu + n_empty) / (nu * (nu + n_empty + 1.0)))
    )


def _delete_log_ratio(state, prior, nu, target):
    n_empty = empty_blocks(state.assignment).size
    reduced = relabel_contiguous(state, target)
    return (
        log_joint_prior(prior, reduced.assignment)
        - log_joint_prior(prior, state.assignment)
        + np.log(nu * (nu + n_empty) / (n_empty * (nu + n_empty - 1.0)))
    ), reduced


def empty_block_move(state, prior, nu, model, rng):
    """Add or delete an empty block, leaving the likelihood untouched.

    With no empty blocks an add is proposed outright; otherwise add is
    chosen with probability nu / (N_empty + nu) and delete with the
    complement.  An add appends block K+1 with a parameter drawn from the
    prior (its density cancels out of the acceptance ratio); a delete
    targets the trailing block and is void unless that block is empty.
    Pinning the delete to the trailing block makes the two proposals exact
    inverses, which the (N_empty + 1) factor in the add ratio accounts
    for.
    """
    empties = empty_blocks(state.assignment)
    if empties.size == 0 or rng.random() < nu / (nu + empties.size):
        ok, capped = _accept(_add_log_ratio(state, prior, nu), rng)
        if ok:
            theta = np.vstack([state.theta, model.prior_sample(rng)[None, :]])
            state = SamplerState(
                BlockAssignment(state.labels.copy(), state.k + 1),
                BlockParams(state.theta0.copy(), theta),
                state.iteration,
            )
        return state, MoveOutcome("add_empty", ok, capped)
    target = state.k - 1
    if block_sizes(state.assignment)[target] != 0:
        return state, MoveOutcome("delete_empty", False, -np.inf)
    log_ratio, reduced = _delete_log_ratio(state, prior, nu, target)
    ok, capped = _accept(log_ratio, rng)
    return (reduced if ok else state), MoveOutcome("delete_empty", ok, capped)


# -- Gibbs reassignment ----------------------------------------------------------

def gibbs_log_probs(state, network, model, prior, i):
    """Normalised log reassignment probabilities of node i over all K blocks."""
    lp = conditional_log_probs(prior, state.assignment, i) + node_log_likelihoods(
        network, state.assignment, state.params, model, i
    )
    return lp - _logsumexp(lp)


def gibbs_sweep(state, network, model, prior, rng):
    """Resample every node's label in order from its full conditional.

    Equivalent to drawing node i from ``gibbs_log_probs`` with all
    previous reassignments applied.  Edge densities under every block
    parameter are tabulated once per sweep (labels change inside the
    sweep, the parameters do not), so the per-node work is index
    arithmetic only.
    """
    state = state.copy()
    labels = state.assignment.labels
    k = state.k
    n = network.n_nodes
    weights = network.weights
    model._require_in_space(state.theta0)
    model._require_in_space(state.theta)
    dens0 = model.log_density(weights, state.theta0, check=False)          # (N, N)
    dens = model.log_density(weights[None, :, :],
                             state.theta[:, None, None, :], check=False)  # (K, N, N)
    if n > 1:
        idx = np.arange(n)
        others_table = np.tile(idx, (n, 1))[~np.eye(n, dtype=bool)].reshape(n, n - 1)
    sizes = np.bincount(labels, minlength=k).astype(float)
    log_denom = np.log(k * prior.gamma + n - 1.0) if n > 1 else 0.0
    for i in range(n):
        sizes[labels[i]] -= 1.0
        ll = np.log(prior.gamma + sizes) - log_denom
        if n > 1:
            oth = others_table[i]
            lab_o = labels[oth]
            ll += dens0[i, oth].sum() + np.bincount(
                lab_o, weights=dens[lab_o, i, oth] - dens0[i, oth], minlength=k
            )
            if network.directed:
                ll += dens0[oth, i].sum() + np.bincount(
                    lab_o, weights=dens[lab_o, oth, i] - dens0[oth, i], minlength=k
                )
        if network.self_loops:
            ll += dens[:, i, i]
        if np.isnan(ll).any():
            # infinite-density cancellations; recompute this node robustly
            ll = conditional_log_probs(prior, state.assignment, i) + node_log_likelihoods(
                network, state.assignment, state.params, model, i, check=False
            )
        new_label = _categorical(ll, rng)
        labels[i] = new_label
        sizes[new_label] += 1.0
    return state


# -- chain driver ------------------------------------------------------------------

def initial_state(network, model, prior, init, rng) -> SamplerState:
    """Starting point: a draw from the prior, or one of the two extreme
    block configurations used for convergence bounding."""
    n = network.n_nodes
    if init == "one-block":
        k = 1
        labels = np.zeros(n, dtype=np.int64)
    elif init == "singletons":
        k = n
        labels = np.arange(n, dtype=np.int64)
    elif init == "prior":
        k = 1 + int(rng.poisson(prior.delta))
        rho = rng.dirichlet(np.full(k, prior.gamma))
        labels = rng.choice(k, size=n, p=rho)
    else:
        raise ValueError(f"unknown init mode {init!r}; use one of {INIT_MODES}")
    theta0 = model.prior_sample(rng)
    theta = model.prior_sample(rng, size=k)
    return SamplerState(BlockAssignment(labels, k), BlockParams(theta0, theta))


def run_chain(network, model, prior, config, init="prior", rng=None) -> TraceStore:
    """Run one chain and record (K, Z, theta) plus move outcomes per iteration.

    Results are a deterministic function of the seed (or the supplied
    generator state).
    """
    if model.discrete:
        model.check_weights(network.weights)
    if rng is None:
        rng = np.random.default_rng(config.seed)
    state = initial_state(network, model, prior, init, rng)
    s_total = config.iterations
    n = network.n_nodes
    k_trace = np.empty(s_total, dtype=np.int64)
    z_trace = np.empty((s_total, n), dtype=np.int64)
    theta0_trace = np.empty((s_total, model.p))
    theta_trace = []
    move_log = []
    for s in range(s_total):
        state, outcomes = rw_update_params(state, network, model, rng, config.rw_sd)
        if state.k == 1 or rng.random() < 0.5:
            state, sm = propose_split(state, network, model, prior, config, rng)
        else:
            state, sm = propose_merge(state, network, model, prior, config, rng)
        state, eb = empty_block_move(state, prior, config.nu, model, rng)
        state = gibbs_sweep(state, network, model, prior, rng)
        state.iteration = s + 1
        k_trace[s] = state.k
        z_trace[s] = state.labels
        theta0_trace[s] = state.theta0
        theta_trace.append(state.theta.copy())
        move_log.append(outcomes + [sm, eb])
    return TraceStore(
        n_nodes=n,
        p=model.p,
        model_name=model.name,
        k=k_trace,
        z=z_trace,
        theta0=theta0_trace,
        theta=theta_trace,
        move_log=move_log,
    )
