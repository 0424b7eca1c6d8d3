"""File formats: networks, truth labels, and flat key-value run configs.

Networks load from either a dense CSV matrix (one row per node) or a
whitespace-separated edge list ``i j w`` with 1-based indices.  Directive
lines toggle interpretation::

    #directed      edges are ordered pairs
    #selfloops     diagonal entries are modelled
    #nodes N       node count (edge lists only; default is the max index)

Dense output uses shortest round-trip float formatting, so a network
written and re-read is bit-identical.  Config files are flat ``key =
value`` text with ``#`` comments; values parse as bool/int/float when
they look like one and stay strings otherwise.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from gsbm.errors import DataError, UsageError
from gsbm.models import MODELS
from gsbm.network import Network


def write_network(network: Network, path):
    with open(path, "w") as fh:
        if network.directed:
            fh.write("#directed\n")
        if network.self_loops:
            fh.write("#selfloops\n")
        for row in network.weights:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def read_network(path, directed=None, self_loops=None) -> Network:
    """Load a network file, honouring directives unless overridden."""
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise DataError(f"cannot read network file {path}: {exc}") from exc
    file_directed = False
    file_self_loops = False
    declared_nodes = None
    data = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            directive = line[1:].split()
            if not directive:
                continue
            key = directive[0].lower()
            if key == "directed":
                file_directed = True
            elif key == "selfloops":
                file_self_loops = True
            elif key == "nodes":
                try:
                    declared_nodes = int(directive[1])
                except (IndexError, ValueError):
                    raise DataError(f"{path}:{lineno}: malformed #nodes directive") from None
            continue
        data.append((lineno, line))
    if not data:
        raise DataError(f"{path}: no network data found")
    use_directed = file_directed if directed is None else bool(directed)
    use_self_loops = file_self_loops if self_loops is None else bool(self_loops)

    if "," in data[0][1]:
        weights = _parse_dense(path, data)
    else:
        weights = _parse_edge_list(path, data, declared_nodes, use_directed)
    try:
        return Network(weights, directed=use_directed, self_loops=use_self_loops)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc


def _parse_dense(path, data):
    rows = []
    for lineno, line in data:
        try:
            rows.append([float(tok) for tok in line.split(",")])
        except ValueError:
            raise DataError(f"{path}:{lineno}: malformed matrix row") from None
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise DataError(f"{path}: matrix must be square, got {n} rows")
    return np.array(rows)


def _parse_edge_list(path, data, declared_nodes, directed):
    triples = []
    max_idx = 0
    for lineno, line in data:
        tok = line.split()
        if len(tok) != 3:
            raise DataError(f"{path}:{lineno}: edge list rows are 'i j w'")
        try:
            i, j, w = int(tok[0]), int(tok[1]), float(tok[2])
        except ValueError:
            raise DataError(f"{path}:{lineno}: malformed edge list row") from None
        if i < 1 or j < 1:
            raise DataError(f"{path}:{lineno}: node indices are 1-based")
        triples.append((lineno, i - 1, j - 1, w))
        max_idx = max(max_idx, i, j)
    n = declared_nodes if declared_nodes is not None else max_idx
    if max_idx > n:
        raise DataError(f"{path}: edge references node {max_idx} beyond #nodes {n}")
    weights = np.zeros((n, n))
    seen = np.zeros((n, n), dtype=bool)
    for lineno, i, j, w in triples:
        targets = [(i, j)] if directed else [(i, j), (j, i)]
        for a, b in targets:
            if seen[a, b] and weights[a, b] != w:
                raise DataError(f"{path}:{lineno}: conflicting weight for edge ({a + 1}, {b + 1})")
            weights[a, b] = w
            seen[a, b] = True
    return weights


def write_truth(labels, path):
    labels = np.asarray(labels, dtype=np.int64)
    with open(path, "w") as fh:
        for lab in labels:
            fh.write(f"{int(lab) + 1}\n")


def read_truth(path) -> np.ndarray:
    try:
        with open(path) as fh:
            values = [line.strip() for line in fh if line.strip() and not line.startswith("#")]
    except OSError as exc:
        raise DataError(f"cannot read truth file {path}: {exc}") from exc
    try:
        labels = np.array([int(v) - 1 for v in values], dtype=np.int64)
    except ValueError:
        raise DataError(f"{path}: truth labels must be 1-based integers") from None
    if labels.size == 0 or labels.min() < 0:
        raise DataError(f"{path}: truth labels must be 1-based integers")
    return labels


# -- run configuration ---------------------------------------------------------

def _parse_scalar(text: str):
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def read_config_file(path) -> dict:
    out = {}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected 'key = value'")
                key, _, value = line.partition("=")
                out[key.strip()] = _parse_scalar(value.strip())
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    return out


HYPER_KEYS = {
    "bernoulli": ("beta_a", "beta_b"),
    "poisson": ("gamma_shape", "gamma_rate"),
    "negbin": ("beta_a", "beta_b", "gamma_shape", "gamma_rate"),
    "normal": ("mean_loc", "mean_scale", "prec_shape", "prec_rate"),
}

_TOP_KEYS = {
    "model", "gamma", "delta", "iterations", "burn_in", "n_chains", "seed",
    "init", "sigma_u", "rw_sd", "nu", "network", "out_dir", "directed",
    "self_loops", "block_sizes", "k_max",
}
_THETA_KEY = re.compile(r"theta_\d+$")


@dataclass
class RunConfig:
    """Resolved run settings; every value echoes into the manifest."""

    model: str
    gamma: float
    delta: float
    iterations: int = 10000
    burn_in: int | None = None
    n_chains: int = 1
    seed: int = 0
    init: str = "prior"
    sigma_u: float = 1.0
    rw_sd: float = 0.1
    nu: float = 1.0
    network: str | None = None
    out_dir: str | None = None
    directed: bool | None = None
    self_loops: bool | None = None
    k_max: int | None = None
    model_hypers: dict = field(default_factory=dict)
    generation: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.model not in MODELS:
            raise UsageError(f"unknown model {self.model!r}; choose from {sorted(MODELS)}")
        if not self.gamma > 0 or not self.delta > 0:
            raise UsageError("gamma and delta must be positive")
        if self.iterations < 1:
            raise UsageError("iterations must be at least 1")
        if self.burn_in is None:
            self.burn_in = self.iterations // 2
        if not 0 <= self.burn_in < self.iterations:
            raise UsageError("burn_in must satisfy 0 <= burn_in < iterations")
        if self.n_chains < 1:
            raise UsageError("n_chains must be at least 1")
        for name in ("sigma_u", "rw_sd", "nu"):
            if not getattr(self, name) > 0:
                raise UsageError(f"{name} must be positive")

    @classmethod
    def from_mapping(cls, mapping: dict) -> "RunConfig":
        mapping = dict(mapping)
        model = mapping.get("model")
        if model is None:
            raise UsageError("config is missing the required key 'model'")
        if model not in MODELS:
            raise UsageError(f"unknown model {model!r}; choose from {sorted(MODELS)}")
        hyper_names = HYPER_KEYS[model]
        hypers, generation, fields = {}, {}, {}
        for key, value in mapping.items():
            if key in hyper_names:
                hypers[key] = value
            elif _THETA_KEY.match(key) or key == "block_sizes":
                generation[key] = value
            elif key in _TOP_KEYS:
                fields[key] = value
            elif key in {k for names in HYPER_KEYS.values() for k in names}:
                raise UsageError(f"hyperparameter {key!r} does not apply to model {model!r}")
            else:
                raise UsageError(f"unknown config key {key!r}")
        for required in ("gamma", "delta"):
            if required not in fields:
                raise UsageError(f"config is missing the required key {required!r}")
        fields.pop("block_sizes", None)
        try:
            return cls(model_hypers=hypers, generation=generation, **fields)
        except TypeError as exc:
            raise UsageError(str(exc)) from exc

    def build_model(self):
        from gsbm.models import make_model

        try:
            return make_model(self.model, **self.model_hypers)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc

    def dma_prior(self):
        from gsbm.dma import DmaPrior

        return DmaPrior(float(self.gamma), float(self.delta))

    def sampler_config(self):
        from gsbm.sampler import SamplerConfig

        return SamplerConfig(
            iterations=self.iterations,
            burn_in=self.burn_in,
            sigma_u=self.sigma_u,
            rw_sd=self.rw_sd,
            nu=self.nu,
            seed=self.seed,
        )

    def manifest_items(self) -> list[tuple[str, object]]:
        items = [
            ("model", self.model),
            ("gamma", self.gamma),
            ("delta", self.delta),
            ("iterations", self.iterations),
            ("burn_in", self.burn_in),
            ("n_chains", self.n_chains),
            ("seed", self.seed),
            ("init", self.init),
            ("sigma_u", self.sigma_u),
            ("rw_sd", self.rw_sd),
            ("nu", self.nu),
        ]
        for key in sorted(self.model_hypers):
            items.append((key, self.model_hypers[key]))
        for key in sorted(self.generation):
            items.append((key, self.generation[key]))
        if self.network is not None:
            items.append(("network", self.network))
        if self.directed is not None:
            items.append(("directed", self.directed))
        if self.self_loops is not None:
            items.append(("self_loops", self.self_loops))
        if self.k_max is not None:
            items.append(("k_max", self.k_max))
        return items
