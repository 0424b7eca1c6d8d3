import numpy as np
import pytest

from gsbm.network import Network, edge_indices


def _pairs(network):
    rows, cols = edge_indices(network)
    return set(zip(rows.tolist(), cols.tolist()))


def test_undirected_edges_each_pair_once():
    net = Network(np.zeros((3, 3)))
    assert _pairs(net) == {(0, 1), (0, 2), (1, 2)}


def test_directed_edges_both_orders():
    net = Network(np.zeros((2, 2)), directed=True)
    assert _pairs(net) == {(0, 1), (1, 0)}


def test_directed_self_loops_included():
    net = Network(np.zeros((2, 2)), directed=True, self_loops=True)
    assert _pairs(net) == {(0, 0), (0, 1), (1, 0), (1, 1)}


@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_edge_counts(n):
    w = np.zeros((n, n))
    assert edge_indices(Network(w))[0].size == n * (n - 1) // 2
    assert edge_indices(Network(w, self_loops=True))[0].size == n * (n - 1) // 2 + n
    assert edge_indices(Network(w, directed=True))[0].size == n * (n - 1)
    assert edge_indices(Network(w, directed=True, self_loops=True))[0].size == n * n


def test_symmetry_enforced_for_undirected():
    w = np.zeros((2, 2))
    w[0, 1] = 1.0
    with pytest.raises(ValueError, match="symmetric"):
        Network(w)
    Network(w, directed=True)  # fine when directed


def test_weights_must_be_finite():
    w = np.zeros((2, 2))
    w[0, 1] = w[1, 0] = np.inf
    with pytest.raises(ValueError, match="finite"):
        Network(w)


def test_weights_read_only():
    net = Network(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        net.weights[0, 1] = 2.0


def test_non_square_rejected():
    with pytest.raises(ValueError, match="square"):
        Network(np.zeros((2, 3)))
