"""Command-line entry points: generate, fit, diagnose, oracle."""

from __future__ import annotations

import argparse
import glob as globmod
import math
import os
import sys
import time

import numpy as np

from gsbm.diagnostics import (
    DegenerateSeriesError,
    gelman_rubin,
    match_labels,
    modal_assignment,
    pad_trace,
    posterior_pairs,
    summarize_params,
    summary_series,
)
from gsbm.errors import DataError, UsageError
from gsbm.generate import generate_network, generation_inputs
from gsbm.io import RunConfig, read_config_file, read_network, read_truth, write_network, write_truth
from gsbm.models import MODELS
from gsbm.oracle import enumerate_posterior, exact_pair_matrix
from gsbm.sampler import INIT_MODES, run_chain
from gsbm.trace import TraceStore


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="gsbm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="sample a synthetic block network")
    gen.add_argument("--config", required=True)
    gen.add_argument("--out-network", required=True)
    gen.add_argument("--out-truth", required=True)
    gen.add_argument("--seed", type=int)
    gen.set_defaults(func=cmd_generate)

    fit = sub.add_parser("fit", help="run the split-merge sampler")
    fit.add_argument("--config", required=True)
    fit.add_argument("--network")
    fit.add_argument("--out-dir", required=True)
    fit.add_argument("--chains", type=int)
    fit.add_argument("--seed", type=int)
    fit.add_argument("--init", help="init mode, or a comma list with one entry per chain")
    fit.set_defaults(func=cmd_fit)

    dia = sub.add_parser("diagnose", help="summarise stored traces")
    dia.add_argument("--traces", required=True, help="glob of trace CSV files")
    dia.add_argument("--truth")
    dia.add_argument("--network", help="render the edge-weight heatmap too")
    dia.add_argument("--out-dir", required=True)
    dia.add_argument("--burn-in", type=int)
    dia.set_defaults(func=cmd_diagnose)

    orc = sub.add_parser("oracle", help="exact posterior for a small conjugate instance")
    orc.add_argument("--network", required=True)
    orc.add_argument("--config", required=True)
    orc.add_argument("--out", required=True)
    orc.set_defaults(func=cmd_oracle)
    return parser


def _load_config(path, **overrides) -> RunConfig:
    mapping = read_config_file(path)
    for key, value in overrides.items():
        if value is not None:
            mapping[key] = value
    return RunConfig.from_mapping(mapping)


def cmd_generate(args) -> int:
    config = _load_config(args.config, seed=args.seed)
    sizes, theta = generation_inputs(config)
    try:
        network, truth = generate_network(
            sizes,
            config.build_model(),
            theta,
            directed=bool(config.directed),
            self_loops=bool(config.self_loops),
            seed=config.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    write_network(network, args.out_network)
    write_truth(truth, args.out_truth)
    print(f"wrote {network.n_nodes}-node network to {args.out_network}")
    print(f"wrote truth labels to {args.out_truth}")
    return 0


def _chain_job(payload):
    network, model, prior, sconfig, init, seed_key = payload
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed_key[0], spawn_key=(seed_key[1],)))
    return run_chain(network, model, prior, sconfig, init=init, rng=rng)


def cmd_fit(args) -> int:
    config = _load_config(args.config, network=args.network, out_dir=args.out_dir,
                          n_chains=args.chains, seed=args.seed, init=args.init)
    if config.network is None:
        raise UsageError("fit needs a network (flag --network or config key)")
    inits = [tok.strip() for tok in str(config.init).split(",")]
    for mode in inits:
        if mode not in INIT_MODES:
            raise UsageError(f"unknown init mode {mode!r}; use one of {INIT_MODES}")
    if len(inits) == 1:
        inits = inits * config.n_chains
    if len(inits) != config.n_chains:
        raise UsageError("init list must have one entry per chain")

    network = read_network(config.network, directed=config.directed,
                           self_loops=config.self_loops)
    model = config.build_model()
    if model.discrete:
        try:
            model.check_weights(network.weights)
        except ValueError as exc:
            raise DataError(f"{config.network}: {exc}") from exc
    prior = config.dma_prior()
    sconfig = config.sampler_config()

    os.makedirs(config.out_dir, exist_ok=True)
    jobs = [
        (network, model, prior, sconfig, inits[c], (config.seed, c))
        for c in range(config.n_chains)
    ]
    started = time.time()
    if config.n_chains == 1:
        traces = [_chain_job(jobs[0])]
    else:
        from concurrent.futures import ProcessPoolExecutor

        workers = min(config.n_chains, os.cpu_count() or 1)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            traces = list(pool.map(_chain_job, jobs))
    wall = time.time() - started

    trace_paths = []
    for c, trace in enumerate(traces, start=1):
        path = os.path.join(config.out_dir, f"trace_chain{c:02d}.csv")
        trace.save_csv(path)
        trace_paths.append(path)
    manifest = os.path.join(config.out_dir, "manifest.txt")
    with open(manifest, "w") as fh:
        for key, value in config.manifest_items():
            fh.write(f"{key} = {value}\n")
        for c, (path, mode) in enumerate(zip(trace_paths, inits)):
            fh.write(f"chain{c + 1:02d} = {os.path.basename(path)} init={mode} "
                     f"seed_spawn=({config.seed},{c})\n")
        fh.write(f"wall_time_seconds = {wall:.3f}\n")
    for path in trace_paths:
        print(f"wrote {path}")
    print(f"wrote {manifest} ({wall:.1f}s)")
    return 0


def _write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")


def _format_float(v):
    return "NA" if (isinstance(v, float) and math.isnan(v)) else repr(float(v))


def cmd_diagnose(args) -> int:
    paths = sorted(globmod.glob(args.traces))
    if not paths:
        raise DataError(f"no trace files match {args.traces!r}")
    traces = [TraceStore.load_csv(p) for p in paths]
    n = traces[0].n_nodes
    if any(t.n_nodes != n for t in traces):
        raise DataError("traces disagree on the number of nodes")
    if any(t.p != traces[0].p for t in traces):
        raise DataError("traces disagree on the parameter dimension")
    lengths = [t.iterations for t in traces]
    burn_in = args.burn_in if args.burn_in is not None else min(lengths) // 2
    if any(burn_in >= s for s in lengths):
        raise DataError(f"burn-in {burn_in} leaves no samples for some chain")
    os.makedirs(args.out_dir, exist_ok=True)

    combined = TraceStore(
        n_nodes=n,
        p=traces[0].p,
        model_name=traces[0].model_name,
        k=np.concatenate([t.k[burn_in:] for t in traces]),
        z=np.vstack([t.z[burn_in:] for t in traces]),
        theta0=np.vstack([t.theta0[burn_in:] for t in traces]),
        theta=[th for t in traces for th in t.theta[burn_in:]],
    )

    pairs = posterior_pairs(combined, 0)
    _write_csv(
        os.path.join(args.out_dir, "pair_matrix.csv"),
        [f"node{j + 1}" for j in range(n)],
        [[repr(float(v)) for v in row] for row in pairs],
    )
    mode = modal_assignment(combined, 0)
    _write_csv(
        os.path.join(args.out_dir, "modal_assignment.csv"),
        ["node", "block"],
        [[i + 1, int(b) + 1] for i, b in enumerate(mode)],
    )

    if args.truth:
        truth = read_truth(args.truth)
        if truth.size != n:
            raise DataError("truth labels disagree with the traces on node count")
        matched = match_labels(combined, truth, 0)
    else:
        matched = pad_trace(combined)
    component_names = None
    model_name = traces[0].model_name
    if model_name in MODELS:
        component_names = list(MODELS[model_name].components)
    summary = summarize_params(matched, 0, component_names=component_names)
    _write_csv(
        os.path.join(args.out_dir, "summary.csv"),
        ["parameter", "mode", "q05", "q95", "ess", "presence"],
        [
            [s.parameter, _format_float(s.mode), _format_float(s.q_lo),
             _format_float(s.q_hi), _format_float(s.ess), _format_float(s.presence)]
            for s in summary
        ],
    )

    rhat_rows = []
    if len(traces) >= 2 and len(set(lengths)) == 1:
        series = [summary_series(t) for t in traces]
        for label, idx in (("mean", 0), ("variance", 1)):
            chains = np.array([s[idx][burn_in:] for s in series])
            try:
                r_hat, upper = gelman_rubin(chains)
                rhat_rows.append([label, repr(r_hat), repr(upper)])
            except DegenerateSeriesError:
                rhat_rows.append([label, "degenerate", "degenerate"])
    else:
        rhat_rows.append(["unavailable", "NA", "NA"])
    _write_csv(os.path.join(args.out_dir, "gelman_rubin.csv"),
               ["summary", "rhat", "upper95"], rhat_rows)

    from gsbm import plots

    order = np.argsort(mode, kind="stable")
    plots.save_pair_heatmap(pairs, order, os.path.join(args.out_dir, "pair_matrix.svg"))
    plots.save_k_trace([t.k for t in traces],
                       [os.path.basename(p) for p in paths],
                       os.path.join(args.out_dir, "k_trace.svg"))
    if args.network:
        network = read_network(args.network)
        if network.n_nodes != n:
            raise DataError("network disagrees with the traces on node count")
        plots.save_weight_heatmap(network.weights, order,
                                  os.path.join(args.out_dir, "edge_weights.svg"))
    print(f"wrote diagnostics for {len(traces)} chain(s) to {args.out_dir}")
    return 0


def cmd_oracle(args) -> int:
    config = _load_config(args.config)
    network = read_network(args.network, directed=config.directed,
                           self_loops=config.self_loops)
    model = config.build_model()
    try:
        model.check_weights(network.weights)
    except ValueError as exc:
        raise DataError(f"{args.network}: {exc}") from exc
    try:
        posterior = enumerate_posterior(network, model, config.dma_prior(),
                                        k_max=config.k_max)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    rows = []
    for entry in sorted(posterior.entries, key=lambda e: -e.prob):
        partition = "|".join(" ".join(str(i + 1) for i in blk) for blk in entry.partition)
        rows.append([entry.k, partition, repr(entry.prob)])
    _write_csv(args.out, ["k", "partition", "probability"], rows)
    pairs = exact_pair_matrix(posterior)
    pair_path = os.path.splitext(args.out)[0] + ".pairs.csv"
    _write_csv(pair_path,
               [f"node{j + 1}" for j in range(posterior.n_nodes)],
               [[repr(float(v)) for v in row] for row in pairs])
    print(f"wrote exact posterior ({len(rows)} entries, "
          f"prior tail beyond k_max {posterior.truncation_tail:.2e}) to {args.out}")
    print(f"wrote exact pair matrix to {pair_path}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
