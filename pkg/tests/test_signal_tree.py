import numpy as np
import pytest

from glc.signal_tree import Signal, SignalTree


def test_root_fields():
    tree = SignalTree(c=10, R=5)
    root = tree.node(tree.create_root((0.0, 0.0)))
    assert root.depth == 0 and root.cost == 0 and root.terminal_time == 0
    assert root.parent is None and root.control is None
    np.testing.assert_array_equal(root.terminal_state, [0.0, 0.0])


def test_two_roots_are_distinct():
    tree = SignalTree(c=1, R=1)
    a, b = tree.create_root((1, 2, 3)), tree.create_root((1, 2, 3))
    assert a != b
    np.testing.assert_array_equal(tree[a].terminal_state, tree[b].terminal_state)


def test_child_accumulates_cost_and_time():
    tree = SignalTree(c=3, R=2)
    root = tree.create_root((0.0,))
    a = tree.add_child(root, (1.0,), (1.0,), 1.0)
    b = tree.add_child(a, (1.0,), (2.0,), 0.5)
    c = tree.add_child(b, (1.0,), (3.0,), 0.5)
    node = tree[c]
    assert node.depth == 3 and node.cost == 2.0
    assert node.terminal_time == 3 * 3 / 2


def test_zero_cost_edge():
    tree = SignalTree(c=1, R=1)
    root = tree.create_root((0.0,))
    assert tree[tree.add_child(root, (0.0,), (0.0,), 0.0)].cost == 0


def test_chain_cost_matches_min_time():
    c, R, k = 10.0, 4, 7
    tree = SignalTree(c, R)
    nid = tree.create_root((0.0,))
    for _ in range(k):
        nid = tree.add_child(nid, (0.0,), (0.0,), c / R)
    assert tree[nid].cost == pytest.approx(k * c / R, abs=1e-12)
    assert tree[nid].terminal_time == k * c / R


def test_errors():
    tree = SignalTree(c=1, R=1)
    root = tree.create_root((0.0,))
    with pytest.raises(KeyError):
        tree.add_child(99, (0.0,), (0.0,), 0.0)
    with pytest.raises(ValueError):
        tree.add_child(root, (0.0,), (0.0,), -1.0)
    with pytest.raises(KeyError):
        tree.reconstruct_signal(5)
    with pytest.raises(ValueError):
        SignalTree(c=0, R=1)


def test_reconstruct_signal_order_and_length():
    tree = SignalTree(c=2, R=2)
    nid = tree.create_root((0.0,))
    for u in (1.0, -1.0, 0.5):
        nid = tree.add_child(nid, (u,), (0.0,), 1.0)
    sig = tree.reconstruct_signal(nid)
    assert len(sig) == 3 and sig.duration == 3.0
    assert [float(u[0]) for u in sig.controls] == [1.0, -1.0, 0.5]
    assert len(tree.reconstruct_signal(0)) == 0


def test_node_arrays_are_frozen():
    tree = SignalTree(c=1, R=1)
    root = tree.node(tree.create_root((0.0, 1.0)))
    with pytest.raises(ValueError):
        root.terminal_state[0] = 5.0


def test_signal_value_at_piecewise_constant():
    sig = Signal(((1.0,), (2.0,), (3.0,)), 0.5)
    assert sig.value_at(0.0) == (1.0,)
    assert sig.value_at(0.49) == (1.0,)
    assert sig.value_at(0.5) == (2.0,)
    assert sig.value_at(1.5) == (3.0,)  # the last interval is closed
    with pytest.raises(ValueError):
        sig.value_at(1.6)


def test_signal_concat():
    a = Signal(((1.0,),), 0.5)
    b = Signal(((2.0,), (3.0,)), 0.5)
    assert a.concat(b).controls == ((1.0,), (2.0,), (3.0,))
    with pytest.raises(ValueError):
        a.concat(Signal(((1.0,),), 0.25))
