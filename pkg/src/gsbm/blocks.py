"""Block assignments, per-block parameters, and label bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class BlockAssignment:
    """Node-to-block labels in 0..k-1.

    ``k`` counts declared blocks, so some may be empty; the add/delete
    moves of the sampler rely on empty blocks being legal states.
    """

    labels: np.ndarray
    k: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.ndim != 1 or labels.size < 1:
            raise ValueError("labels must be a non-empty 1-D integer vector")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if labels.min() < 0 or labels.max() >= self.k:
            raise ValueError("labels must lie in 0..k-1")
        self.labels = labels

    @property
    def n_nodes(self) -> int:
        return self.labels.size

    def copy(self) -> "BlockAssignment":
        return BlockAssignment(self.labels.copy(), self.k)


def block_sizes(assignment: BlockAssignment) -> np.ndarray:
    """Occupancy count of every declared block (zeros retained)."""
    return np.bincount(assignment.labels, minlength=assignment.k)


def empty_blocks(assignment: BlockAssignment) -> np.ndarray:
    """Indices of blocks with no members."""
    return np.flatnonzero(block_sizes(assignment) == 0)


@dataclass
class BlockParams:
    """Edge-weight parameters: ``theta0`` governs between-block edges,
    row k of ``theta`` governs within-block edges of block k."""

    theta0: np.ndarray  # (p,)
    theta: np.ndarray   # (k, p)

    def __post_init__(self):
        theta0 = np.asarray(self.theta0, dtype=float)
        theta = np.asarray(self.theta, dtype=float)
        if theta0.ndim != 1:
            raise ValueError("theta0 must be a 1-D parameter vector")
        if theta.ndim != 2 or theta.shape[1] != theta0.size:
            raise ValueError("theta must be (k, p) with p matching theta0")
        self.theta0 = theta0
        self.theta = theta

    @property
    def p(self) -> int:
        return self.theta0.size

    @property
    def k(self) -> int:
        return self.theta.shape[0]

    def copy(self) -> "BlockParams":
        return BlockParams(self.theta0.copy(), self.theta.copy())


@dataclass
class SamplerState:
    """Markov-chain state: one assignment plus matching block parameters.

    Owned by exactly one chain; use :meth:`copy` to hand a snapshot to
    another context.
    """

    assignment: BlockAssignment
    params: BlockParams
    iteration: int = 0

    def __post_init__(self):
        if self.assignment.k != self.params.k:
            raise ValueError("assignment and params disagree on the number of blocks")

    @property
    def k(self) -> int:
        return self.assignment.k

    @property
    def labels(self) -> np.ndarray:
        return self.assignment.labels

    @property
    def theta0(self) -> np.ndarray:
        return self.params.theta0

    @property
    def theta(self) -> np.ndarray:
        return self.params.theta

    def copy(self) -> "SamplerState":
        return SamplerState(self.assignment.copy(), self.params.copy(), self.iteration)


def theta_for_edge(assignment: BlockAssignment, params: BlockParams, i: int, j: int) -> np.ndarray:
    """Parameter vector governing edge (i, j): the shared block's row when
    both endpoints agree, otherwise theta0."""
    li, lj = assignment.labels[i], assignment.labels[j]
    return params.theta[li] if li == lj else params.theta0


def relabel_contiguous(state: SamplerState, removed_block: int) -> SamplerState:
    """Drop an empty block and compact the labels above it.

    The removed block must be empty, so the likelihood of the state is
    untouched; only the label indexing and the parameter table change.
    """
    k = state.assignment.k
    if not 0 <= removed_block < k:
        raise ValueError(f"block index {removed_block} out of range for k={k}")
    if k == 1:
        raise ValueError("cannot remove the only block")
    if block_sizes(state.assignment)[removed_block] != 0:
        raise ValueError("refusing to remove a non-empty block")
    labels = state.assignment.labels.copy()
    labels[labels > removed_block] -= 1
    theta = np.delete(state.params.theta, removed_block, axis=0)
    return SamplerState(
        BlockAssignment(labels, k - 1),
        BlockParams(state.params.theta0.copy(), theta),
        state.iteration,
    )
