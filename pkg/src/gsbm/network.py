"""Weighted-network container and edge-set conventions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Network:
    """Dense weighted graph on N nodes.

    ``weights[i, j]`` is the weight of edge (i, j).  Undirected networks
    store the full symmetric matrix but every likelihood computation visits
    each unordered pair exactly once.  The diagonal is ignored unless
    ``self_loops`` is set.  Instances are read-only after construction and
    safe to share across concurrently running chains.
    """

    weights: np.ndarray
    directed: bool = False
    self_loops: bool = False

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"weight matrix must be square, got shape {w.shape}")
        if w.shape[0] < 1:
            raise ValueError("network needs at least one node")
        if not np.all(np.isfinite(w)):
            raise ValueError("edge weights must be finite")
        if not self.directed and not np.array_equal(w, w.T):
            raise ValueError("undirected network requires a symmetric weight matrix")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n_nodes(self) -> int:
        return self.weights.shape[0]


def edge_indices(network: Network) -> tuple[np.ndarray, np.ndarray]:
    """Row/column index arrays listing every modelled edge exactly once.

    Undirected networks yield pairs i < j, directed networks all ordered
    pairs i != j; diagonal entries are appended when self-loops are
    modelled.  The arrays are computed once per network and cached.
    """
    cached = network.__dict__.get("_edge_indices")
    if cached is not None:
        return cached
    n = network.n_nodes
    if network.directed:
        off = ~np.eye(n, dtype=bool)
        rows, cols = np.nonzero(off)
    else:
        rows, cols = np.triu_indices(n, k=1)
    if network.self_loops:
        diag = np.arange(n)
        rows = np.concatenate([rows, diag])
        cols = np.concatenate([cols, diag])
    rows.setflags(write=False)
    cols.setflags(write=False)
    object.__setattr__(network, "_edge_indices", (rows, cols))
    return rows, cols
