"""Synthetic block-structured networks with known ground truth."""

from __future__ import annotations

import numpy as np

from gsbm.errors import UsageError
from gsbm.models import EdgeModel
from gsbm.network import Network


def generate_network(block_sizes, model: EdgeModel, theta_table, directed=False,
                     self_loops=False, seed=0) -> tuple[Network, np.ndarray]:
    """Sample a network whose nodes fill the given blocks in order.

    ``theta_table`` holds the between-block parameter vector first, then
    one row per block.  Every modelled edge draws from the edge model
    under the parameter its block pair selects; undirected networks are
    symmetrised.  Returns the network and the true labels.
    """
    sizes = np.asarray(block_sizes, dtype=np.int64)
    if sizes.ndim != 1 or sizes.size < 1 or np.any(sizes < 1):
        raise ValueError("block sizes must be positive integers")
    theta = np.asarray(theta_table, dtype=float)
    if theta.ndim != 2 or theta.shape != (sizes.size + 1, model.p):
        raise ValueError(
            f"theta table must be ({sizes.size + 1}, {model.p}): "
            "one between-block row plus one row per block"
        )
    if not model.in_space(theta):
        raise ValueError(f"theta table leaves the {model.name} parameter space")
    labels = np.repeat(np.arange(sizes.size), sizes)
    n = labels.size
    rng = np.random.default_rng(seed)

    if directed:
        rows, cols = np.nonzero(~np.eye(n, dtype=bool))
    else:
        rows, cols = np.triu_indices(n, k=1)
    if self_loops:
        diag = np.arange(n)
        rows = np.concatenate([rows, diag])
        cols = np.concatenate([cols, diag])
    same = labels[rows] == labels[cols]
    theta_edge = np.where(same[:, None], theta[1:][labels[rows]], theta[0])
    draws = model.sample_edge(theta_edge, rng)
    weights = np.zeros((n, n))
    weights[rows, cols] = draws
    if not directed:
        weights[cols, rows] = draws
    return Network(weights, directed=directed, self_loops=self_loops), labels


def generation_inputs(config) -> tuple[list, np.ndarray]:
    """Extract block sizes and the theta table from a run config."""
    gen = config.generation
    raw_sizes = gen.get("block_sizes")
    if raw_sizes is None:
        raise UsageError("generation needs the config key 'block_sizes'")
    try:
        sizes = [int(tok) for tok in str(raw_sizes).split(",")]
    except ValueError:
        raise UsageError("block_sizes must be a comma-separated integer list") from None
    model = config.build_model()
    rows = []
    for b in range(len(sizes) + 1):
        key = f"theta_{b}"
        if key not in gen:
            raise UsageError(f"generation needs the config key {key!r}")
        toks = str(gen[key]).split(",")
        try:
            row = [float(tok) for tok in toks]
        except ValueError:
            raise UsageError(f"{key} must be a comma-separated number list") from None
        if len(row) != model.p:
            raise UsageError(f"{key} needs {model.p} component(s) for model {model.name!r}")
        rows.append(row)
    return sizes, np.array(rows)
