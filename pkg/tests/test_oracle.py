import itertools

import numpy as np
import pytest
from scipy import integrate
from scipy.special import gammaln, logsumexp

from gsbm.blocks import BlockAssignment
from gsbm.dma import DmaPrior, log_prior_k, log_prior_z
from gsbm.models import Bernoulli, NegativeBinomial, Poisson
from gsbm.network import Network, edge_indices
from gsbm.oracle import (
    ExactPosterior,
    _log_marginal,
    enumerate_posterior,
    exact_pair_matrix,
    set_partitions,
)


def brute_force_posterior(network, model, prior, k_max):
    """Independent oracle: enumerate every label vector directly."""
    n = network.n_nodes
    rows, cols = edge_indices(network)
    w = network.weights[rows, cols]
    entries = {}
    logs = []
    keys = []
    for k in range(1, k_max + 1):
        for labels in itertools.product(range(k), repeat=n):
            lab = np.array(labels)
            a = BlockAssignment(lab, k)
            log_w = log_prior_k(prior, k) + log_prior_z(prior, a)
            same = lab[rows] == lab[cols]
            log_w += _log_marginal(model, w[~same])
            for b in range(k):
                log_w += _log_marginal(model, w[same & (lab[rows] == b)])
            # canonical partition: blocks ordered by smallest member
            blocks = {}
            for node, l in enumerate(labels):
                blocks.setdefault(l, []).append(node)
            part = tuple(sorted((tuple(b) for b in blocks.values()), key=lambda b: b[0]))
            keys.append((k, part))
            logs.append(log_w)
    logs = np.array(logs)
    probs = np.exp(logs - logsumexp(logs))
    for key, p in zip(keys, probs):
        entries[key] = entries.get(key, 0.0) + p
    return entries


def test_bell_numbers():
    counts = [sum(1 for _ in set_partitions(n)) for n in range(1, 7)]
    assert counts == [1, 2, 5, 15, 52, 203]


def test_single_node_is_certain():
    post = enumerate_posterior(Network(np.zeros((1, 1))), Bernoulli(), DmaPrior(1, 1), k_max=1)
    assert len(post.entries) == 1
    assert post.entries[0].prob == pytest.approx(1.0)
    assert post.entries[0].partition == ((0,),)


def test_probabilities_sum_to_one():
    rng = np.random.default_rng(0)
    w = (rng.random((5, 5)) < 0.4).astype(float)
    w = np.triu(w, 1)
    net = Network(w + w.T)
    post = enumerate_posterior(net, Bernoulli(), DmaPrior(0.8, 2.0))
    assert sum(e.prob for e in post.entries) == pytest.approx(1.0, abs=1e-10)
    assert post.k_marginal().sum() == pytest.approx(1.0, abs=1e-10)


def test_single_edge_posterior_equals_prior():
    # one Bernoulli edge under Beta(1,1): every structure has marginal
    # likelihood 1/2, so the posterior is the prior over (K, partition)
    net = Network(np.array([[0.0, 1.0], [1.0, 0.0]]))
    prior = DmaPrior(1.0, 1.0)
    post = enumerate_posterior(net, Bernoulli(), prior, k_max=2)
    by_key = {(e.k, e.partition): e.prob for e in post.entries}

    def dma_joint(k, together):
        a = BlockAssignment(np.array([0, 0] if together else [0, 1]), k)
        n_vectors = k if together else k * (k - 1)
        return np.exp(log_prior_k(prior, k) + log_prior_z(prior, a)) * n_vectors

    weights = {
        (1, ((0, 1),)): dma_joint(1, True),
        (2, ((0, 1),)): dma_joint(2, True),
        (2, ((0,), (1,))): dma_joint(2, False),
    }
    z = sum(weights.values())
    for key, w in weights.items():
        assert by_key[key] == pytest.approx(w / z, abs=1e-10)


@pytest.mark.parametrize("model", [Bernoulli(beta_a=2.0, beta_b=1.5), Poisson(gamma_shape=1.5, gamma_rate=0.8)])
def test_matches_brute_force_label_enumeration(model):
    rng = np.random.default_rng(1)
    if isinstance(model, Bernoulli):
        w = (rng.random((4, 4)) < 0.5).astype(float)
    else:
        w = rng.poisson(2.0, size=(4, 4)).astype(float)
    w = np.triu(w, 1)
    net = Network(w + w.T)
    prior = DmaPrior(1.3, 1.7)
    post = enumerate_posterior(net, model, prior, k_max=4)
    expected = brute_force_posterior(net, model, prior, k_max=4)
    got = {(e.k, e.partition): e.prob for e in post.entries}
    assert set(got) == set(expected)
    for key in expected:
        assert got[key] == pytest.approx(expected[key], abs=1e-10)


def test_poisson_marginal_against_quadrature():
    model = Poisson(gamma_shape=1.5, gamma_rate=2.0)
    w = np.array([0.0, 3.0, 1.0])

    def integrand(lam):
        lik = np.exp(model.log_density(w, [lam]).sum())
        prior = 2.0**1.5 * lam**0.5 * np.exp(-2.0 * lam) / np.exp(gammaln(1.5))
        return lik * prior

    expected, _ = integrate.quad(integrand, 0, 60)
    assert _log_marginal(model, w) == pytest.approx(np.log(expected), abs=1e-8)


def test_bernoulli_marginal_against_quadrature():
    model = Bernoulli(beta_a=2.0, beta_b=3.0)
    w = np.array([1.0, 1.0, 0.0])

    def integrand(p):
        lik = np.exp(model.log_density(w, [p]).sum())
        prior = p ** (2.0 - 1) * (1 - p) ** (3.0 - 1) / np.exp(
            gammaln(2.0) + gammaln(3.0) - gammaln(5.0)
        )
        return lik * prior

    expected, _ = integrate.quad(integrand, 0, 1)
    assert _log_marginal(model, w) == pytest.approx(np.log(expected), abs=1e-8)


def test_non_conjugate_family_refused():
    net = Network(np.zeros((2, 2)))
    with pytest.raises(ValueError, match="conjugate"):
        enumerate_posterior(net, NegativeBinomial(), DmaPrior(1, 1))


def test_large_networks_refused():
    net = Network(np.zeros((9, 9)))
    with pytest.raises(ValueError, match="limited"):
        enumerate_posterior(net, Bernoulli(), DmaPrior(1, 1))


def test_truncation_tail_is_poisson_tail():
    net = Network(np.zeros((3, 3)))
    prior = DmaPrior(1.0, 2.0)
    post = enumerate_posterior(net, Bernoulli(), prior, k_max=3)
    expect = 1.0 - sum(np.exp(log_prior_k(prior, k)) for k in (1, 2, 3))
    assert post.truncation_tail == pytest.approx(expect, abs=1e-12)


class TestPairMatrix:
    def test_point_mass_gives_indicator(self):
        post = ExactPosterior(
            n_nodes=3,
            entries=[type("E", (), {"k": 2, "partition": ((0, 1), (2,)), "prob": 1.0})()],
            k_max=2,
            truncation_tail=0.0,
        )
        pairs = exact_pair_matrix(post)
        np.testing.assert_allclose(pairs, [[1, 1, 0], [1, 1, 0], [0, 0, 1]])

    def test_even_mixture_gives_half(self):
        e1 = type("E", (), {"k": 1, "partition": ((0, 1),), "prob": 0.5})()
        e2 = type("E", (), {"k": 2, "partition": ((0,), (1,)), "prob": 0.5})()
        post = ExactPosterior(n_nodes=2, entries=[e1, e2], k_max=2, truncation_tail=0.0)
        pairs = exact_pair_matrix(post)
        assert pairs[0, 1] == pytest.approx(0.5)
        assert pairs[0, 0] == pytest.approx(1.0)

    def test_single_edge_pair_probability_matches_prior(self):
        net = Network(np.array([[0.0, 1.0], [1.0, 0.0]]))
        prior = DmaPrior(1.0, 1.0)
        post = enumerate_posterior(net, Bernoulli(), prior, k_max=2)
        pairs = exact_pair_matrix(post)
        co = sum(e.prob for e in post.entries if e.partition == ((0, 1),))
        assert pairs[0, 1] == pytest.approx(co, abs=1e-12)
        assert np.allclose(np.diag(pairs), 1.0)
