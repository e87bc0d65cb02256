import numpy as np
import pytest
from hypothesis import given, strategies as st

from glc.environment import (
    Ball,
    Box,
    Complement,
    Everywhere,
    HalfSpace,
    Intersection,
    Nowhere,
    Union,
    free_space,
    goal_union,
    primitive_from_dict,
)

coord = st.floats(-5, 5, allow_nan=False)
point = st.tuples(coord, coord)


def test_ball_is_open():
    b = Ball((0.0, 0.0), 1.0)
    assert b.contains((0.5, 0.0))
    assert not b.contains((1.0, 0.0))


def test_box_is_open():
    b = Box((-1.0, -1.0), (1.0, 1.0))
    assert b.contains((0.0, 0.0))
    assert not b.contains((1.0, 0.0))


def test_halfspace():
    h = HalfSpace((1.0, 0.0), 2.0)
    assert h.contains((1.9, 100.0)) and not h.contains((2.0, 0.0))
    assert h.clearance(np.array([0.0, 0.0])) == pytest.approx(2.0)


def test_complement_of_two_balls():
    free = free_space(None, [Ball((0.0, 0.0), 1.0), Ball((3.0, 0.0), 1.0)])
    assert free.contains((1.5, 0.0))
    assert not free.contains((0.0, 0.0)) and not free.contains((3.0, 0.5))
    # boundary of an obstacle is not free: free space stays open
    assert not free.contains((1.0, 0.0))


def test_box_clearance_is_signed_distance():
    b = Box((0.0, 0.0), (2.0, 2.0))
    assert b.clearance(np.array([1.0, 1.0])) == pytest.approx(1.0)
    assert b.clearance(np.array([3.0, 1.0])) == pytest.approx(-1.0)
    assert b.clearance(np.array([3.0, 3.0])) == pytest.approx(-np.sqrt(2))


def test_axes_selection():
    b = Ball((1.0,), 0.5, axes=(2,))
    assert b.contains((9.0, 9.0, 1.2)) and not b.contains((0.0, 0.0, 2.0))


def test_vectorised():
    b = Ball((0.0, 0.0), 1.0)
    pts = np.array([[[0.0, 0.0], [2.0, 0.0]], [[0.5, 0.5], [0.0, 1.0]]])
    np.testing.assert_array_equal(b(pts), [[True, False], [True, False]])


def test_everywhere_nowhere_goal_union():
    assert Everywhere().contains((1e9, -1e9))
    assert not Nowhere().contains((0.0, 0.0))
    assert not goal_union([]).contains((0.0,))
    g = goal_union([Ball((0.0,), 1.0), Ball((5.0,), 1.0)])
    assert g.contains((5.5,)) and not g.contains((3.0,))


def test_operators():
    a, b = Ball((0.0, 0.0), 1.0), Ball((1.0, 0.0), 1.0)
    assert (a & b).contains((0.5, 0.0)) and not (a & b).contains((-0.5, 0.0))
    assert (a | b).contains((-0.5, 0.0))
    assert (~a).contains((2.0, 2.0))


def test_primitive_from_dict():
    assert primitive_from_dict({"ball": {"center": [0, 0], "radius": 1}}).contains((0.1, 0.1))
    box = primitive_from_dict({"box": {"lo": [0, 0], "hi": [1, 1], "axes": [1, 2]}})
    assert box.contains((9.0, 0.5, 0.5))
    assert primitive_from_dict({"halfspace": {"normal": [0, 1], "offset": 0}}).contains((0.0, -1.0))
    for bad in ({"cone": {}}, {"ball": {"center": [0]}}, {"ball": {"center": [0], "radius": -1}},
                {"box": {"lo": [1], "hi": [0]}}, {"box": 3}, {}):
        with pytest.raises(ValueError):
            primitive_from_dict(bad)


SHAPES = [
    Box((-1.0, -2.0), (1.5, 0.5)),
    Ball((0.5, 0.5), 1.2),
    HalfSpace((1.0, 2.0), 0.5),
    Complement(Box((0.0, 0.0), (1.0, 1.0))),
    Intersection((Box((-3.0, -3.0), (3.0, 3.0)), Complement(Ball((0.0, 0.0), 1.0)))),
    Union((Ball((-2.0, 0.0), 1.0), Box((1.0, -1.0), (2.0, 1.0)))),
]


@pytest.mark.parametrize("shape", SHAPES, ids=lambda s: type(s).__name__)
@given(p=point)
def test_membership_agrees_with_clearance(shape, p):
    x = np.array(p)
    c = float(shape.clearance(x))
    if abs(c) > 1e-9:
        assert bool(shape(x)) == (c > 0)
        assert bool(shape.exterior(x)) == (c < 0)


@pytest.mark.parametrize("shape", SHAPES[:4], ids=lambda s: type(s).__name__)
@given(p=point, q=point)
def test_clearance_is_one_lipschitz(shape, p, q):
    # a signed distance cannot change faster than the points move
    cp, cq = float(shape.clearance(np.array(p))), float(shape.clearance(np.array(q)))
    assert abs(cp - cq) <= np.hypot(p[0] - q[0], p[1] - q[1]) + 1e-9


@given(p=point, r=st.floats(0.01, 0.5))
def test_clearance_ball_fits_in_free_space(p, r):
    # any point within the clearance of a free point is itself free
    free = free_space(Box((-4.0, -4.0), (4.0, 4.0)), [Ball((0.0, 0.0), 1.0), Box((1.5, -1.0), (2.5, 3.0))])
    x = np.array(p)
    c = float(free.clearance(x))
    if c > 0:
        rng = np.random.default_rng(0)
        d = rng.normal(size=(64, 2))
        d *= (c * (1 - 1e-9)) / np.linalg.norm(d, axis=1, keepdims=True)
        assert np.all(free(x + d))
