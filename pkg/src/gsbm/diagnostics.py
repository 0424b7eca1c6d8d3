"""Posterior summaries and convergence assessment for stored chains.

Covers the co-clustering (pairing) matrix, modal assignments, post-hoc
label matching against known ground truth, the Gelman-Rubin potential
scale reduction factor with its upper confidence bound, effective sample
sizes, and per-parameter summary tables.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.stats import f as f_dist

from gsbm.trace import TraceStore


class DegenerateSeriesError(ValueError):
    """Raised when chains carry no variation to diagnose."""


def posterior_pairs(trace, burn_in: int) -> np.ndarray:
    """Co-membership probability matrix over retained samples.

    Entry (i, j) is the fraction of post-burn-in samples in which nodes i
    and j share a block; symmetric with unit diagonal.
    """
    z = np.asarray(trace.z)
    if not 0 <= burn_in < z.shape[0]:
        raise ValueError("burn_in leaves no retained samples")
    kept = z[burn_in:]
    n = z.shape[1]
    pairs = np.zeros((n, n))
    for row in kept:
        pairs += row[:, None] == row[None, :]
    return pairs / kept.shape[0]


def modal_assignment(trace, burn_in: int) -> np.ndarray:
    """Most frequent post-burn-in label per node, ties toward the smallest."""
    z = np.asarray(trace.z)
    if not 0 <= burn_in < z.shape[0]:
        raise ValueError("burn_in leaves no retained samples")
    kept = z[burn_in:]
    width = int(kept.max()) + 1
    out = np.empty(kept.shape[1], dtype=np.int64)
    for i in range(kept.shape[1]):
        out[i] = np.argmax(np.bincount(kept[:, i], minlength=width))
    return out


@dataclass
class MatchedTrace:
    """Trace with labels permuted onto a reference labelling.

    Block parameters are stored densely as (S, B, p) with NaN marking
    blocks absent from an iteration, which makes per-block series easy to
    summarise even though the underlying chain is ragged in K.
    """

    n_nodes: int
    p: int
    model_name: str
    k: np.ndarray
    z: np.ndarray
    theta0: np.ndarray
    theta: np.ndarray  # (S, B, p), NaN-padded

    @property
    def iterations(self) -> int:
        return self.k.size

    @property
    def n_block_slots(self) -> int:
        return self.theta.shape[1]


def pad_trace(trace: TraceStore) -> MatchedTrace:
    """Dense view of a raw trace with identity labelling."""
    s = trace.iterations
    width = int(trace.k.max())
    theta = np.full((s, width, trace.p), np.nan)
    for step, th in enumerate(trace.theta):
        theta[step, : th.shape[0]] = th
    return MatchedTrace(
        n_nodes=trace.n_nodes,
        p=trace.p,
        model_name=trace.model_name,
        k=trace.k.copy(),
        z=trace.z.copy(),
        theta0=trace.theta0.copy(),
        theta=theta,
    )


def match_labels(trace: TraceStore, truth, burn_in: int) -> MatchedTrace:
    """Permute chain labels so the modal assignment lines up with ``truth``.

    The permutation maximises the modal-vs-truth contingency counts
    greedily in descending order; modal blocks left unmatched (and labels
    never modal at all) receive fresh labels past the truth's range.
    Co-membership structure is untouched, only the labelling moves.
    """
    truth = np.asarray(truth, dtype=np.int64)
    if truth.shape != (trace.n_nodes,):
        raise ValueError("truth labels must give one label per node")
    mode = modal_assignment(trace, burn_in)
    universe = int(max(trace.z.max(), mode.max())) + 1
    n_truth = int(truth.max()) + 1

    counts = np.zeros((universe, n_truth), dtype=np.int64)
    for c, t in zip(mode, truth):
        counts[c, t] += 1
    pairs = [(counts[c, t], c, t) for c in range(universe) for t in range(n_truth)]
    pairs.sort(key=lambda item: (-item[0], item[1], item[2]))
    perm = np.full(universe, -1, dtype=np.int64)
    taken = np.zeros(n_truth, dtype=bool)
    for cnt, c, t in pairs:
        if cnt == 0:
            break
        if perm[c] < 0 and not taken[t]:
            perm[c] = t
            taken[t] = True
    nxt = n_truth
    for c in range(universe):
        if perm[c] < 0:
            perm[c] = nxt
            nxt += 1

    padded = pad_trace(trace)
    z = perm[padded.z]
    width = int(perm.max()) + 1
    theta = np.full((padded.iterations, width, padded.p), np.nan)
    for step in range(padded.iterations):
        kk = int(padded.k[step])
        theta[step, perm[:kk]] = padded.theta[step, :kk]
    return MatchedTrace(
        n_nodes=padded.n_nodes,
        p=padded.p,
        model_name=padded.model_name,
        k=padded.k,
        z=z,
        theta0=padded.theta0,
        theta=theta,
    )


def gelman_rubin(chains) -> tuple[float, float]:
    """Potential scale reduction factor and its 95% upper confidence bound.

    Uses the between/within variance decomposition with the
    degrees-of-freedom adjustment and the F-quantile upper bound of the
    classic formulation.  Chains must have equal length; constant chains
    are refused as degenerate.
    """
    x = np.asarray(chains, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError("need at least two equal-length chains")
    m, n = x.shape
    if n < 2:
        raise ValueError("chains are too short")
    means = x.mean(axis=1)
    s2 = x.var(axis=1, ddof=1)
    w = s2.mean()
    b = n * means.var(ddof=1)
    if w == 0.0:
        raise DegenerateSeriesError("zero within-chain variance")
    var_w = s2.var(ddof=1) / m
    var_b = 2.0 * b * b / (m - 1)
    cov_wb = (n / m) * (
        np.cov(s2, means**2, ddof=1)[0, 1]
        - 2.0 * means.mean() * np.cov(s2, means, ddof=1)[0, 1]
    )
    v_hat = (n - 1) / n * w + (1.0 + 1.0 / m) * b / n
    var_v = (
        ((n - 1) ** 2 * var_w + (1 + 1 / m) ** 2 * var_b
         + 2 * (n - 1) * (1 + 1 / m) * cov_wb) / n**2
    )
    r2_fixed = (n - 1) / n
    r2_random = (1 + 1 / m) * b / (n * w)
    if var_v > 0:
        df_v = 2.0 * v_hat**2 / var_v
        df_adj = (df_v + 3.0) / (df_v + 1.0)
    else:
        df_adj = 1.0
    if var_w > 0:
        w_df = 2.0 * w**2 / var_w
        upper = np.sqrt(df_adj * (r2_fixed + f_dist.ppf(0.975, m - 1, w_df) * r2_random))
    else:
        upper = np.sqrt(df_adj * (r2_fixed + r2_random))
    r_hat = np.sqrt(df_adj * (r2_fixed + r2_random))
    return float(r_hat), float(upper)


def effective_sample_size(series) -> float:
    """IID-equivalent sample count via the initial-monotone-sequence rule.

    Autocovariances are paired into Gamma_m = rho_{2m} + rho_{2m+1},
    truncated at the first non-positive pair, and forced non-increasing;
    the result is clamped to the series length (anti-correlated series
    would otherwise exceed it).  Constant series report their own length.
    """
    x = np.asarray(series, dtype=float)
    n = x.size
    if n < 10:
        raise ValueError("series too short for an ESS estimate")
    if np.ptp(x) == 0.0:
        warnings.warn("constant series; reporting ESS equal to its length")
        return float(n)
    x = x - x.mean()
    f = np.fft.rfft(x, 2 * n)
    acov = np.fft.irfft(f * np.conj(f))[:n] / n
    rho = acov / acov[0]
    gammas = []
    for m in range(n // 2):
        g = rho[2 * m] + (rho[2 * m + 1] if 2 * m + 1 < n else 0.0)
        if g <= 0.0:
            break
        gammas.append(g)
    if not gammas:
        return float(n)
    gammas = np.minimum.accumulate(gammas)
    tau = 2.0 * gammas.sum() - 1.0
    if tau <= 0.0 or n / tau > n:
        warnings.warn("anti-correlated series; ESS clamped to the series length")
        return float(n)
    return float(n / tau)


@dataclass(frozen=True)
class ParameterSummary:
    parameter: str
    mode: float
    q_lo: float
    q_hi: float
    ess: float       # NaN when the component is too rarely present
    presence: float  # fraction of retained iterations carrying the component


def _histogram_mode(values: np.ndarray, bins: int = 100) -> float:
    if np.ptp(values) == 0.0:
        return float(values[0])
    counts, edges = np.histogram(values, bins=bins)
    i = int(np.argmax(counts))
    return float(0.5 * (edges[i] + edges[i + 1]))


def summarize_params(matched: MatchedTrace, burn_in: int,
                     quantiles=(0.05, 0.95), component_names=None,
                     min_presence: float = 0.1) -> list[ParameterSummary]:
    """Histogram mode, quantiles, and ESS for every parameter component.

    Components present in fewer than ``min_presence`` of the retained
    iterations get a NaN ESS (their gappy series cannot support an
    autocorrelation estimate); fully absent components are skipped.
    """
    if not 0 <= burn_in < matched.iterations:
        raise ValueError("burn_in leaves no retained samples")
    p = matched.p
    if component_names is None:
        component_names = [f"c{c + 1}" for c in range(p)] if p > 1 else [""]
    lo, hi = quantiles
    rows = []

    def summarise(name, series, presence):
        kept = series[np.isfinite(series)]
        if kept.size == 0:
            return
        if presence >= min_presence and kept.size >= 10:
            ess = effective_sample_size(kept)
        else:
            ess = float("nan")
        rows.append(ParameterSummary(
            parameter=name,
            mode=_histogram_mode(kept),
            q_lo=float(np.quantile(kept, lo)),
            q_hi=float(np.quantile(kept, hi)),
            ess=ess,
            presence=presence,
        ))

    def name_for(block, comp):
        suffix = f".{component_names[comp]}" if p > 1 else ""
        return f"theta{block}{suffix}"

    for c in range(p):
        summarise(name_for(0, c), matched.theta0[burn_in:, c], 1.0)
    for b in range(matched.n_block_slots):
        block = matched.theta[burn_in:, b, :]
        presence = float(np.isfinite(block[:, 0]).mean())
        for c in range(p):
            summarise(name_for(b + 1, c), block[:, c], presence)
    return rows


def summary_series(trace) -> tuple[np.ndarray, np.ndarray]:
    """Per-iteration mean and variance of all parameter values.

    Flattens theta0 and every block row into one vector per iteration;
    the two scalar series are the usual inputs to the Gelman-Rubin
    statistic for trans-dimensional chains.
    """
    s = trace.iterations
    means = np.empty(s)
    variances = np.empty(s)
    if isinstance(trace, MatchedTrace):
        per_iter = (
            np.concatenate([trace.theta0[i], trace.theta[i][np.isfinite(trace.theta[i][:, 0])].ravel()])
            for i in range(s)
        )
    else:
        per_iter = (
            np.concatenate([trace.theta0[i], trace.theta[i].ravel()])
            for i in range(s)
        )
    for i, vals in enumerate(per_iter):
        means[i] = vals.mean()
        variances[i] = vals.var()
    return means, variances
