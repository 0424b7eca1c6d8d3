"""Report figures rendered to files next to the delimited output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_weight_heatmap(weights, order, path):
    """Edge-weight matrix reordered by block, on a log(1 + W) scale when
    the weights are non-negative."""
    w = np.asarray(weights, dtype=float)[np.ix_(order, order)]
    label = "weight"
    if w.min() >= 0.0:
        w = np.log1p(w)
        label = "log(1 + weight)"
    fig, ax = plt.subplots(figsize=(5.2, 4.4))
    im = ax.imshow(w, cmap="viridis", interpolation="nearest")
    fig.colorbar(im, ax=ax, label=label)
    ax.set_title("edge weights (nodes ordered by modal block)")
    ax.set_xlabel("node")
    ax.set_ylabel("node")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_pair_heatmap(pairs, order, path):
    """Posterior co-membership probabilities, same node order as the
    weight heatmap."""
    p = np.asarray(pairs, dtype=float)[np.ix_(order, order)]
    fig, ax = plt.subplots(figsize=(5.2, 4.4))
    im = ax.imshow(p, cmap="viridis", vmin=0.0, vmax=1.0, interpolation="nearest")
    fig.colorbar(im, ax=ax, label="P(same block)")
    ax.set_title("posterior co-clustering (nodes ordered by modal block)")
    ax.set_xlabel("node")
    ax.set_ylabel("node")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_k_trace(k_series, labels, path):
    """Block-count trace, one stepped line per chain."""
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    for ks, lab in zip(k_series, labels):
        ax.step(np.arange(1, len(ks) + 1), ks, where="mid", label=lab, alpha=0.8)
    ax.set_xlabel("iteration")
    ax.set_ylabel("number of blocks")
    ax.set_title("block-count trace")
    if len(k_series) > 1:
        ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
