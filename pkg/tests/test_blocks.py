import numpy as np
import pytest

from gsbm.blocks import (
    BlockAssignment,
    BlockParams,
    SamplerState,
    block_sizes,
    empty_blocks,
    relabel_contiguous,
    theta_for_edge,
)
from gsbm.models import log_likelihood, make_model
from gsbm.network import Network


def _state(labels, k, theta0, theta):
    return SamplerState(
        BlockAssignment(np.array(labels), k),
        BlockParams(np.array(theta0, dtype=float), np.array(theta, dtype=float)),
    )


def test_block_sizes_counts():
    assert block_sizes(BlockAssignment(np.array([0, 0, 1]), 2)).tolist() == [2, 1]
    assert block_sizes(BlockAssignment(np.array([0, 0, 0, 0]), 1)).tolist() == [4]


def test_block_sizes_keeps_empty_blocks():
    a = BlockAssignment(np.array([0, 2, 2]), 3)
    assert block_sizes(a).tolist() == [1, 0, 2]
    assert empty_blocks(a).tolist() == [1]


def test_label_range_validated():
    with pytest.raises(ValueError):
        BlockAssignment(np.array([0, 3]), 2)
    with pytest.raises(ValueError):
        BlockAssignment(np.array([-1, 0]), 2)


def test_theta_for_edge_selects_block_or_between():
    st = _state([0, 0], 1, [0.1], [[0.4]])
    assert theta_for_edge(st.assignment, st.params, 0, 1) == pytest.approx([0.4])
    st = _state([0, 1], 2, [0.1], [[0.4], [0.6]])
    assert theta_for_edge(st.assignment, st.params, 0, 1) == pytest.approx([0.1])
    st = _state([1, 1, 0], 2, [0.1], [[0.4], [0.6]])
    assert theta_for_edge(st.assignment, st.params, 0, 1) == pytest.approx([0.6])


def test_relabel_contiguous_compacts_labels():
    st = _state([0, 2, 2], 3, [0.1], [[0.2], [0.3], [0.4]])
    out = relabel_contiguous(st, 1)
    assert out.labels.tolist() == [0, 1, 1]
    assert out.k == 2
    assert out.theta[:, 0].tolist() == [0.2, 0.4]


def test_relabel_contiguous_drops_leading_empty():
    st = _state([1, 1], 2, [0.1], [[0.2], [0.3]])
    out = relabel_contiguous(st, 0)
    assert out.labels.tolist() == [0, 0]
    assert out.k == 1
    assert out.theta[:, 0].tolist() == [0.3]


def test_relabel_contiguous_refuses_occupied_or_last():
    st = _state([0, 1], 2, [0.1], [[0.2], [0.3]])
    with pytest.raises(ValueError, match="non-empty"):
        relabel_contiguous(st, 0)
    single = _state([0, 0], 1, [0.1], [[0.2]])
    with pytest.raises(ValueError, match="only block"):
        relabel_contiguous(single, 0)


def test_relabel_preserves_occupied_size_multiset():
    rng = np.random.default_rng(0)
    for _ in range(50):
        k = int(rng.integers(2, 6))
        labels = rng.integers(0, k, size=10)
        a = BlockAssignment(labels, k)
        empties = empty_blocks(a)
        if empties.size == 0:
            continue
        st = SamplerState(a, BlockParams(np.array([0.5]), rng.uniform(0.1, 0.9, (k, 1))))
        out = relabel_contiguous(st, int(empties[0]))
        before = sorted(s for s in block_sizes(a) if s > 0)
        after = sorted(s for s in block_sizes(out.assignment) if s > 0)
        assert before == after


def test_log_likelihood_invariant_to_joint_label_permutation():
    rng = np.random.default_rng(1)
    model = make_model("bernoulli")
    w = (rng.random((6, 6)) < 0.5).astype(float)
    w = np.triu(w, 1)
    net = Network(w + w.T)
    for _ in range(25):
        k = int(rng.integers(1, 5))
        labels = rng.integers(0, k, size=6)
        theta = rng.uniform(0.05, 0.95, size=(k, 1))
        theta0 = rng.uniform(0.05, 0.95, size=1)
        perm = rng.permutation(k)
        base = log_likelihood(net, BlockAssignment(labels, k), BlockParams(theta0, theta), model)
        permuted = log_likelihood(
            net,
            BlockAssignment(perm[labels], k),
            BlockParams(theta0, theta[np.argsort(perm)]),
            model,
        )
        assert base == pytest.approx(permuted, abs=1e-10)


def test_state_requires_consistent_k():
    with pytest.raises(ValueError, match="disagree"):
        SamplerState(
            BlockAssignment(np.array([0, 1]), 2),
            BlockParams(np.array([0.1]), np.array([[0.2]])),
        )
