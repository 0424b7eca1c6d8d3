"""Edge-weight model families, their priors, and likelihood evaluation.

Every family exposes the same surface: an elementwise ``log_density``,
edge sampling, a prior over one parameter vector with independent
components, and per-component matching transforms used by the
trans-dimensional moves.  The sampler never refers to a family by name,
so adding a family only means subclassing :class:`EdgeModel`.

``log_density(w, theta)`` broadcasts: ``theta`` has shape ``(..., p)``
and ``w`` broadcasts against ``theta[..., 0]``; the result is the
elementwise log density.  Callers sum.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np
from scipy.special import betaln, expit, gammaln

from gsbm.blocks import BlockAssignment, BlockParams
from gsbm.network import Network, edge_indices

SPACE_REAL = "real"
SPACE_POSITIVE = "positive"
SPACE_UNIT = "unit"

_LOG_2PI = float(np.log(2.0 * np.pi))


class MatchingFunction:
    """Componentwise bijection from a constrained parameter space onto R^p.

    The component tag selects the transform: identity on the reals, log on
    positive components, logit on unit-interval components.  Each transform
    is strictly increasing, so linear mixing on the matched scale maps back
    inside the original space.
    """

    def __init__(self, spaces):
        spaces = tuple(spaces)
        unknown = set(spaces) - {SPACE_REAL, SPACE_POSITIVE, SPACE_UNIT}
        if unknown:
            raise ValueError(f"unknown parameter space tags: {sorted(unknown)}")
        self.spaces = spaces

    @property
    def p(self) -> int:
        return len(self.spaces)

    def match(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        out = np.empty_like(theta)
        for c, tag in enumerate(self.spaces):
            x = theta[..., c]
            if tag == SPACE_REAL:
                out[..., c] = x
            elif tag == SPACE_POSITIVE:
                if np.any(x <= 0.0):
                    raise ValueError("log matching needs strictly positive values")
                out[..., c] = np.log(x)
            else:
                if np.any((x <= 0.0) | (x >= 1.0)):
                    raise ValueError("logit matching needs values inside (0, 1)")
                out[..., c] = np.log(x) - np.log1p(-x)
        return out

    def unmatch(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        out = np.empty_like(y)
        with np.errstate(over="ignore"):
            for c, tag in enumerate(self.spaces):
                v = y[..., c]
                if tag == SPACE_REAL:
                    out[..., c] = v
                elif tag == SPACE_POSITIVE:
                    out[..., c] = np.exp(v)
                else:
                    out[..., c] = expit(v)
        return out

    def log_grad(self, theta) -> np.ndarray:
        """Log of the product over components of the transform's derivative.

        Boundary values give +inf (derivative diverges); proposals that
        land there are rejected by the caller rather than raising here.
        """
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape[:-1])
        with np.errstate(divide="ignore"):
            for c, tag in enumerate(self.spaces):
                x = theta[..., c]
                if tag == SPACE_POSITIVE:
                    out = out - np.log(x)
                elif tag == SPACE_UNIT:
                    out = out - np.log(x) - np.log1p(-x)
        return out


class EdgeModel:
    """Base class for edge-weight distribution families."""

    name: str = ""
    components: tuple = ()
    spaces: tuple = ()
    discrete: bool = False

    @property
    def p(self) -> int:
        return len(self.components)

    @cached_property
    def matching(self) -> MatchingFunction:
        return MatchingFunction(self.spaces)

    @property
    def prior_hyper(self) -> tuple:
        raise NotImplementedError

    # -- parameter-space checks -------------------------------------------
    def in_space(self, theta) -> bool:
        """True when every component lies in its (closed) declared domain."""
        theta = np.asarray(theta, dtype=float)
        if theta.shape[-1] != self.p:
            return False
        ok = np.all(np.isfinite(theta))
        for c, tag in enumerate(self.spaces):
            x = theta[..., c]
            if tag == SPACE_POSITIVE:
                ok = ok and np.all(x > 0.0)
            elif tag == SPACE_UNIT:
                ok = ok and np.all((x >= 0.0) & (x <= 1.0))
        return bool(ok)

    def in_interior(self, theta) -> bool:
        """True when every component lies strictly inside its domain, i.e.
        where the matching transform is defined."""
        theta = np.asarray(theta, dtype=float)
        if theta.shape[-1] != self.p or not np.all(np.isfinite(theta)):
            return False
        ok = True
        for c, tag in enumerate(self.spaces):
            x = theta[..., c]
            if tag == SPACE_POSITIVE:
                ok = ok and np.all(x > 0.0)
            elif tag == SPACE_UNIT:
                ok = ok and np.all((x > 0.0) & (x < 1.0))
        return bool(ok)

    def _require_in_space(self, theta):
        if not self.in_space(theta):
            raise ValueError(f"parameters outside the {self.name} parameter space")

    def check_weights(self, w):
        """Raise if any weight lies outside the support of the family."""
        w = np.asarray(w, dtype=float)
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if self.discrete and not np.all((w >= 0) & (w == np.floor(w))):
            raise ValueError(f"{self.name} model needs non-negative integer weights")

    # -- family surface ----------------------------------------------------
    def log_density(self, w, theta, check: bool = True) -> np.ndarray:
        raise NotImplementedError

    def sample_edge(self, theta, rng, size=None) -> np.ndarray:
        raise NotImplementedError

    def prior_log_density(self, theta) -> np.ndarray:
        raise NotImplementedError

    def prior_sample(self, rng, size=None) -> np.ndarray:
        raise NotImplementedError


def _beta_logpdf(x, a, b):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ta = 0.0 if a == 1.0 else (a - 1.0) * np.log(x)
        tb = 0.0 if b == 1.0 else (b - 1.0) * np.log1p(-x)
        out = ta + tb - betaln(a, b)
    return np.where((x >= 0.0) & (x <= 1.0), out, -np.inf)


def _gamma_logpdf(x, shape, rate):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (
            shape * np.log(rate)
            + (shape - 1.0) * np.log(x)
            - rate * x
            - gammaln(shape)
        )
    return np.where(x > 0.0, out, -np.inf)


def _normal_logpdf(x, loc, scale):
    x = np.asarray(x, dtype=float)
    z = (x - loc) / scale
    return -0.5 * _LOG_2PI - np.log(scale) - 0.5 * z * z


def _positive_hyper(**kwargs):
    for name, value in kwargs.items():
        if not (np.isfinite(value) and value > 0):
            raise ValueError(f"hyperparameter {name} must be positive, got {value}")


class Bernoulli(EdgeModel):
    """Binary edges with a Beta prior on the edge probability."""

    name = "bernoulli"
    components = ("p",)
    spaces = (SPACE_UNIT,)
    discrete = True

    def __init__(self, beta_a=1.0, beta_b=1.0):
        _positive_hyper(beta_a=beta_a, beta_b=beta_b)
        self.beta_a = float(beta_a)
        self.beta_b = float(beta_b)

    @property
    def prior_hyper(self):
        return (self.beta_a, self.beta_b)

    def log_density(self, w, theta, check=True):
        if check:
            self._require_in_space(theta)
        w = np.asarray(w, dtype=float)
        prob = np.asarray(theta, dtype=float)[..., 0]
        with np.errstate(divide="ignore"):
            dens = np.where(w == 1.0, np.log(prob), np.log1p(-prob))
        return np.where((w == 0.0) | (w == 1.0), dens, -np.inf)

    def sample_edge(self, theta, rng, size=None):
        self._require_in_space(theta)
        prob = np.asarray(theta, dtype=float)[..., 0]
        return rng.binomial(1, prob, size=size).astype(float)

    def prior_log_density(self, theta):
        theta = np.asarray(theta, dtype=float)
        return _beta_logpdf(theta[..., 0], self.beta_a, self.beta_b)

    def prior_sample(self, rng, size=None):
        return np.stack([rng.beta(self.beta_a, self.beta_b, size=size)], axis=-1)


class Poisson(EdgeModel):
    """Count edges with a Gamma(shape, rate) prior on the rate."""

    name = "poisson"
    components = ("lambda",)
    spaces = (SPACE_POSITIVE,)
    discrete = True

    def __init__(self, gamma_shape=1.0, gamma_rate=1.0):
        _positive_hyper(gamma_shape=gamma_shape, gamma_rate=gamma_rate)
        self.gamma_shape = float(gamma_shape)
        self.gamma_rate = float(gamma_rate)

    @property
    def prior_hyper(self):
        return (self.gamma_shape, self.gamma_rate)

    def log_density(self, w, theta, check=True):
        if check:
            self._require_in_space(theta)
        w = np.asarray(w, dtype=float)
        lam = np.asarray(theta, dtype=float)[..., 0]
        with np.errstate(invalid="ignore"):
            dens = w * np.log(lam) - lam - gammaln(w + 1.0)
        return np.where((w >= 0.0) & (w == np.floor(w)), dens, -np.inf)

    def sample_edge(self, theta, rng, size=None):
        self._require_in_space(theta)
        lam = np.asarray(theta, dtype=float)[..., 0]
        return rng.poisson(lam, size=size).astype(float)

    def prior_log_density(self, theta):
        theta = np.asarray(theta, dtype=float)
        return _gamma_logpdf(theta[..., 0], self.gamma_shape, self.gamma_rate)

    def prior_sample(self, rng, size=None):
        draw = rng.gamma(self.gamma_shape, 1.0 / self.gamma_rate, size=size)
        return np.stack([draw], axis=-1)


class NegativeBinomial(EdgeModel):
    """Overdispersed counts: success probability p and a real-valued
    failure count r, with a Beta prior on p and a Gamma prior on r.

    No conjugate prior exists when both components are unknown, which is
    exactly the situation the sampler is built to handle.
    """

    name = "negbin"
    components = ("p", "r")
    spaces = (SPACE_UNIT, SPACE_POSITIVE)
    discrete = True

    def __init__(self, beta_a=1.0, beta_b=1.0, gamma_shape=1.0, gamma_rate=1.0):
        _positive_hyper(
            beta_a=beta_a, beta_b=beta_b, gamma_shape=gamma_shape, gamma_rate=gamma_rate
        )
        self.beta_a = float(beta_a)
        self.beta_b = float(beta_b)
        self.gamma_shape = float(gamma_shape)
        self.gamma_rate = float(gamma_rate)

    @property
    def prior_hyper(self):
        return (self.beta_a, self.beta_b, self.gamma_shape, self.gamma_rate)

    def log_density(self, w, theta, check=True):
        if check:
            self._require_in_space(theta)
        w = np.asarray(w, dtype=float)
        theta = np.asarray(theta, dtype=float)
        prob, r = theta[..., 0], theta[..., 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            # pmf(w) = Gamma(w+r)/(Gamma(r) w!) * p^r (1-p)^w, with the
            # w=0 branch guarded so p=1 does not produce 0 * -inf.
            dens = (
                gammaln(w + r)
                - gammaln(r)
                - gammaln(w + 1.0)
                + r * np.log(prob)
                + np.where(w > 0.0, w * np.log1p(-prob), 0.0)
            )
        return np.where((w >= 0.0) & (w == np.floor(w)), dens, -np.inf)

    def sample_edge(self, theta, rng, size=None):
        self._require_in_space(theta)
        theta = np.asarray(theta, dtype=float)
        prob, r = theta[..., 0], theta[..., 1]
        return rng.negative_binomial(r, prob, size=size).astype(float)

    def prior_log_density(self, theta):
        theta = np.asarray(theta, dtype=float)
        return _beta_logpdf(theta[..., 0], self.beta_a, self.beta_b) + _gamma_logpdf(
            theta[..., 1], self.gamma_shape, self.gamma_rate
        )

    def prior_sample(self, rng, size=None):
        prob = rng.beta(self.beta_a, self.beta_b, size=size)
        r = rng.gamma(self.gamma_shape, 1.0 / self.gamma_rate, size=size)
        return np.stack([prob, r], axis=-1)


class Normal(EdgeModel):
    """Real-valued edges parameterised by mean and standard deviation.

    Prior: Normal(mean_loc, mean_scale) on the mean and Gamma(prec_shape,
    prec_rate) on the precision 1/sigma^2, expressed as a density over
    sigma.
    """

    name = "normal"
    components = ("mu", "sigma")
    spaces = (SPACE_REAL, SPACE_POSITIVE)
    discrete = False

    def __init__(self, mean_loc=0.0, mean_scale=10.0, prec_shape=1.0, prec_rate=1.0):
        if not np.isfinite(mean_loc):
            raise ValueError("mean_loc must be finite")
        _positive_hyper(
            mean_scale=mean_scale, prec_shape=prec_shape, prec_rate=prec_rate
        )
        self.mean_loc = float(mean_loc)
        self.mean_scale = float(mean_scale)
        self.prec_shape = float(prec_shape)
        self.prec_rate = float(prec_rate)

    @property
    def prior_hyper(self):
        return (self.mean_loc, self.mean_scale, self.prec_shape, self.prec_rate)

    def log_density(self, w, theta, check=True):
        if check:
            self._require_in_space(theta)
        w = np.asarray(w, dtype=float)
        theta = np.asarray(theta, dtype=float)
        return _normal_logpdf(w, theta[..., 0], theta[..., 1])

    def sample_edge(self, theta, rng, size=None):
        self._require_in_space(theta)
        theta = np.asarray(theta, dtype=float)
        return rng.normal(theta[..., 0], theta[..., 1], size=size)

    def prior_log_density(self, theta):
        theta = np.asarray(theta, dtype=float)
        mu, sigma = theta[..., 0], theta[..., 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            # change of variables from the Gamma density on tau = sigma^-2
            lp_sigma = (
                _gamma_logpdf(sigma**-2, self.prec_shape, self.prec_rate)
                + np.log(2.0)
                - 3.0 * np.log(sigma)
            )
        lp_sigma = np.where(sigma > 0.0, lp_sigma, -np.inf)
        return _normal_logpdf(mu, self.mean_loc, self.mean_scale) + lp_sigma

    def prior_sample(self, rng, size=None):
        mu = rng.normal(self.mean_loc, self.mean_scale, size=size)
        tau = rng.gamma(self.prec_shape, 1.0 / self.prec_rate, size=size)
        return np.stack([mu, tau**-0.5], axis=-1)


MODELS = {
    cls.name: cls for cls in (Bernoulli, Poisson, NegativeBinomial, Normal)
}


def make_model(name: str, **hyper) -> EdgeModel:
    """Instantiate a registered family by name with keyword hyperparameters."""
    try:
        cls = MODELS[name]
    except KeyError:
        raise ValueError(
            f"unknown edge model {name!r}; available: {sorted(MODELS)}"
        ) from None
    return cls(**hyper)


# -- likelihood over a network ----------------------------------------------

def log_likelihood(
    network: Network,
    assignment: BlockAssignment,
    params: BlockParams,
    model: EdgeModel,
) -> float:
    """Total edge log-likelihood, one term per modelled edge."""
    rows, cols = edge_indices(network)
    w = network.weights[rows, cols]
    li = assignment.labels[rows]
    lj = assignment.labels[cols]
    same = li == lj
    theta_edge = np.where(same[:, None], params.theta[li], params.theta0[None, :])
    return float(model.log_density(w, theta_edge).sum())


def node_log_likelihoods(
    network: Network,
    assignment: BlockAssignment,
    params: BlockParams,
    model: EdgeModel,
    i: int,
    check: bool = True,
) -> np.ndarray:
    """Log-likelihood of node i's incident edges for every candidate block.

    Entry k is the sum over modelled edges touching i (both directions for
    directed networks, plus the self-loop when modelled) of the edge log
    density with i hypothetically placed in block k, all other labels
    fixed.
    """
    if check:
        model._require_in_space(params.theta0)
        model._require_in_space(params.theta)
    labels = assignment.labels
    k = assignment.k
    others = np.delete(np.arange(network.n_nodes), i)
    lab_o = labels[others]
    out = np.zeros(k)

    def accumulate(w):
        d0 = model.log_density(w, params.theta0, check=False)
        down = model.log_density(w, params.theta[lab_o], check=False)
        if np.all(np.isfinite(d0)) and np.all(np.isfinite(down)):
            return d0.sum() + np.bincount(lab_o, weights=down - d0, minlength=k)
        # zero-density edges break the rank-one update; fall back to the
        # direct per-block sums
        direct = np.empty(k)
        for b in range(k):
            mask = lab_o == b
            direct[b] = down[mask].sum() + d0[~mask].sum()
        return direct

    out += accumulate(network.weights[i, others])
    if network.directed:
        out += accumulate(network.weights[others, i])
    if network.self_loops:
        out += model.log_density(network.weights[i, i], params.theta, check=False)
    return out


def log_likelihood_node(
    network: Network,
    assignment: BlockAssignment,
    params: BlockParams,
    model: EdgeModel,
    i: int,
    candidate_block: int,
) -> float:
    """Node i's incident-edge log-likelihood with i placed in one block."""
    if not 0 <= candidate_block < assignment.k:
        raise ValueError("candidate block out of range")
    return float(node_log_likelihoods(network, assignment, params, model, i)[candidate_block])
