"""Per-iteration chain records and their delimited persistence.

Trace files are plain CSV, one row per iteration:

    iter, K, z_1..z_N, theta0_1..theta0_p, theta_1_1..theta_K_p

Node labels are written 1-based.  The block-parameter tail is ragged (its
length is K * p), so the first line of the file is a directive comment
``#gsbm-trace n=<N> p=<p> model=<name>`` that fixes the column layout.
Floats are written with shortest round-trip precision, making a write/read
cycle bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from gsbm.errors import DataError


@dataclass
class TraceStore:
    """Record of (K, Z, theta) for every stored iteration of one chain."""

    n_nodes: int
    p: int
    model_name: str
    k: np.ndarray            # (S,)
    z: np.ndarray            # (S, N), labels 0-based
    theta0: np.ndarray       # (S, p)
    theta: list              # per-iteration (K_s, p) arrays
    move_log: list = field(default_factory=list)

    def __post_init__(self):
        self.k = np.asarray(self.k, dtype=np.int64)
        self.z = np.asarray(self.z, dtype=np.int64)
        self.theta0 = np.asarray(self.theta0, dtype=float)
        s = self.k.size
        if self.z.shape != (s, self.n_nodes) or self.theta0.shape != (s, self.p):
            raise ValueError("trace arrays disagree on dimensions")
        if len(self.theta) != s:
            raise ValueError("theta records disagree with iteration count")
        for step, (kk, th) in enumerate(zip(self.k, self.theta)):
            if th.shape != (kk, self.p):
                raise ValueError(f"iteration {step}: theta shape {th.shape} != ({kk}, {self.p})")
        if s and (self.z.min() < 0 or np.any(self.z.max(axis=1) >= self.k)):
            raise ValueError("labels must lie in 0..K-1 per iteration")

    @property
    def iterations(self) -> int:
        return self.k.size

    def save_csv(self, path):
        with open(path, "w") as fh:
            fh.write(f"#gsbm-trace n={self.n_nodes} p={self.p} model={self.model_name}\n")
            for s in range(self.iterations):
                parts = [str(s + 1), str(int(self.k[s]))]
                parts += [str(int(z) + 1) for z in self.z[s]]
                parts += [repr(float(v)) for v in self.theta0[s]]
                parts += [repr(float(v)) for v in self.theta[s].ravel()]
                fh.write(",".join(parts) + "\n")

    @classmethod
    def load_csv(cls, path) -> "TraceStore":
        try:
            with open(path) as fh:
                header = fh.readline().strip()
                if not header.startswith("#gsbm-trace"):
                    raise DataError(f"{path}: missing trace directive line")
                meta = dict(tok.split("=", 1) for tok in header.split()[1:])
                try:
                    n = int(meta["n"])
                    p = int(meta["p"])
                    model_name = meta.get("model", "")
                except (KeyError, ValueError):
                    raise DataError(f"{path}: malformed trace directive {header!r}") from None
                ks, zs, theta0s, thetas = [], [], [], []
                for lineno, line in enumerate(fh, start=2):
                    line = line.strip()
                    if not line or line.startswith("#"):
                        continue
                    tok = line.split(",")
                    if len(tok) < 2 + n + p:
                        raise DataError(f"{path}:{lineno}: truncated trace row")
                    kk = int(tok[1])
                    if len(tok) != 2 + n + p + kk * p:
                        raise DataError(
                            f"{path}:{lineno}: expected {2 + n + p + kk * p} fields, got {len(tok)}"
                        )
                    ks.append(kk)
                    zs.append([int(v) - 1 for v in tok[2 : 2 + n]])
                    theta0s.append([float(v) for v in tok[2 + n : 2 + n + p]])
                    flat = np.array([float(v) for v in tok[2 + n + p :]])
                    thetas.append(flat.reshape(kk, p))
        except OSError as exc:
            raise DataError(f"cannot read trace file {path}: {exc}") from exc
        if not ks:
            raise DataError(f"{path}: trace file holds no iterations")
        try:
            return cls(
                n_nodes=n,
                p=p,
                model_name=model_name,
                k=np.array(ks),
                z=np.array(zs),
                theta0=np.array(theta0s),
                theta=thetas,
            )
        except ValueError as exc:
            raise DataError(f"{path}: {exc}") from exc
