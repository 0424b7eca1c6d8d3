import itertools

import numpy as np
import pytest

from gsbm.blocks import BlockAssignment
from gsbm.dma import (
    DmaPrior,
    conditional_log_prob,
    conditional_log_probs,
    log_joint_prior,
    log_prior_k,
    log_prior_z,
)


def test_hyperparameters_validated():
    with pytest.raises(ValueError):
        DmaPrior(0.0, 1.0)
    with pytest.raises(ValueError):
        DmaPrior(1.0, -2.0)


class TestBlockCountPrior:
    def test_closed_forms(self):
        assert log_prior_k(DmaPrior(1, 10), 1) == pytest.approx(-10.0)
        assert log_prior_k(DmaPrior(1, 1), 2) == pytest.approx(-1.0)
        assert log_prior_k(DmaPrior(1, 2), 3) == pytest.approx(np.log(2) - 2)

    def test_rejects_zero_blocks(self):
        with pytest.raises(ValueError):
            log_prior_k(DmaPrior(1, 1), 0)

    @pytest.mark.parametrize("delta", [0.5, 1.0, 5.0, 20.0])
    def test_pmf_sums_to_one(self, delta):
        prior = DmaPrior(1.0, delta)
        total = sum(np.exp(log_prior_k(prior, k)) for k in range(1, 201))
        assert total == pytest.approx(1.0, abs=1e-12)


class TestLabelPrior:
    def test_single_node_is_free(self):
        for gamma in (0.3, 1.0, 4.0):
            a = BlockAssignment(np.array([0]), 1)
            assert log_prior_z(DmaPrior(gamma, 1.0), a) == pytest.approx(0.0)

    def test_two_nodes_shared_block(self):
        a = BlockAssignment(np.array([0, 0]), 2)
        assert log_prior_z(DmaPrior(1.0, 1.0), a) == pytest.approx(np.log(1 / 3))

    def test_two_node_distribution(self):
        prior = DmaPrior(1.0, 1.0)
        probs = {}
        for labels in itertools.product(range(2), repeat=2):
            a = BlockAssignment(np.array(labels), 2)
            probs[labels] = np.exp(log_prior_z(prior, a))
        assert probs[(0, 0)] == pytest.approx(1 / 3)
        assert probs[(1, 1)] == pytest.approx(1 / 3)
        assert probs[(0, 1)] == pytest.approx(1 / 6)
        assert probs[(1, 0)] == pytest.approx(1 / 6)
        assert sum(probs.values()) == pytest.approx(1.0)

    @pytest.mark.parametrize("gamma", [0.5, 1.0, 2.5])
    @pytest.mark.parametrize("n,k", [(2, 3), (4, 2), (5, 3), (3, 4)])
    def test_normalises_over_all_label_vectors(self, gamma, n, k):
        prior = DmaPrior(gamma, 1.0)
        total = sum(
            np.exp(log_prior_z(prior, BlockAssignment(np.array(labels), k)))
            for labels in itertools.product(range(k), repeat=n)
        )
        assert total == pytest.approx(1.0, abs=1e-10)


class TestConditional:
    def test_symmetric_split(self):
        # node 0 free, nodes 1 and 2 in different blocks
        a = BlockAssignment(np.array([0, 0, 1]), 2)
        probs = np.exp(conditional_log_probs(DmaPrior(1.0, 1.0), a, 0))
        np.testing.assert_allclose(probs, [0.5, 0.5])

    def test_loaded_block(self):
        # nodes 1, 2 both in block 0: (1+2)/(2+2) vs (1+0)/(2+2)
        a = BlockAssignment(np.array([0, 0, 0]), 2)
        probs = np.exp(conditional_log_probs(DmaPrior(1.0, 1.0), a, 0))
        np.testing.assert_allclose(probs, [0.75, 0.25])

    def test_probabilities_sum_to_one(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            n = int(rng.integers(2, 8))
            k = int(rng.integers(1, 5))
            a = BlockAssignment(rng.integers(0, k, size=n), k)
            prior = DmaPrior(float(rng.uniform(0.2, 3.0)), 1.0)
            i = int(rng.integers(n))
            total = np.exp(conditional_log_probs(prior, a, i)).sum()
            assert total == pytest.approx(1.0, abs=1e-12)

    def test_matches_direct_ratio_of_marginals(self):
        rng = np.random.default_rng(1)
        for _ in range(30):
            n = int(rng.integers(2, 7))
            k = int(rng.integers(1, 5))
            labels = rng.integers(0, k, size=n)
            prior = DmaPrior(float(rng.uniform(0.3, 2.0)), 1.0)
            i = int(rng.integers(n))
            # direct oracle: renormalised joint marginals over node i's label
            joint = np.empty(k)
            for l in range(k):
                trial = labels.copy()
                trial[i] = l
                joint[l] = log_prior_z(prior, BlockAssignment(trial, k))
            expect = joint - np.log(np.exp(joint - joint.max()).sum()) - joint.max()
            got = conditional_log_probs(prior, BlockAssignment(labels, k), i)
            np.testing.assert_allclose(got, expect, atol=1e-10)

    def test_target_block_range_checked(self):
        a = BlockAssignment(np.array([0, 0]), 1)
        with pytest.raises(ValueError):
            conditional_log_prob(DmaPrior(1, 1), a, 0, 1)


class TestJointPrior:
    def test_single_node(self):
        a = BlockAssignment(np.array([0]), 1)
        assert log_joint_prior(DmaPrior(1.0, 10.0), a) == pytest.approx(-10.0)

    def test_two_nodes_split(self):
        a = BlockAssignment(np.array([0, 1]), 2)
        assert log_joint_prior(DmaPrior(1.0, 1.0), a) == pytest.approx(-1.0 + np.log(1 / 6))

    def test_one_block_beats_empty_extra_block_for_small_delta(self):
        labels = np.zeros(50, dtype=int)
        prior = DmaPrior(1.0, 0.1)
        joint1 = log_joint_prior(prior, BlockAssignment(labels, 1))
        joint2 = log_joint_prior(prior, BlockAssignment(labels, 2))
        assert joint1 > joint2
