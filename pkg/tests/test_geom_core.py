import math

from hypothesis import given, settings
import hypothesis.strategies as st
import numpy as np
import pytest

from colorcount.errors import BadParamsError
import colorcount.geom_core as geom_core


def test_snap_query():
    """
    Check the mapping of real query coordinates into doubled-integer
    space.
    """

    assert geom_core.snap_query(3) == 6
    assert geom_core.snap_query(3.0) == 6
    assert geom_core.snap_query(2.5) == 5
    assert geom_core.snap_query(2.9) == 5
    assert geom_core.snap_query(-0.5) == -1
    assert geom_core.snap_query(-1) == -2
    assert geom_core.snap_query(math.inf) == math.inf
    assert geom_core.snap_query(-math.inf) == -math.inf

    assert geom_core.double(4) == 8
    assert geom_core.double(-math.inf) == -math.inf


@given(
    st.integers(min_value=-50, max_value=50),
    st.integers(min_value=-50, max_value=50),
    st.floats(min_value=-60.0, max_value=60.0, allow_nan=False),
)
def test_snap_preserves_order_against_integers(lo, hi, q):
    """
    Check that a closed integer interval contains a real query iff the
    doubled interval contains the snapped query.
    """

    lo, hi = min(lo, hi), max(lo, hi)

    before = lo <= q <= hi
    after = geom_core.double(lo) <= geom_core.snap_query(q) <= geom_core.double(hi)

    assert before == after


def test_approx_answer_contracts():
    """
    Check the contract checks of the three answer kinds.
    """

    exact = geom_core.ApproxAnswer.exact(5)
    assert exact.holds(5)
    assert not exact.holds(4)

    capprox = geom_core.ApproxAnswer.capprox(3, 4)
    for k in range(3, 13):
        assert capprox.holds(k)
    assert not capprox.holds(2)
    assert not capprox.holds(13)

    eps = geom_core.ApproxAnswer.epsapprox(90.0, 0.1)
    assert eps.holds(100)
    assert eps.holds(82)
    assert not eps.holds(120)
    assert not eps.holds(80)

    zero = geom_core.ApproxAnswer.epsapprox(0.0, 0.5)
    assert zero.holds(0)
    assert not zero.holds(1)


def test_ratio_error():
    """
    Check the relative error, including the empty count.
    """

    assert geom_core.ApproxAnswer.exact(0).ratio_error(0) == 0.0
    assert geom_core.ApproxAnswer.exact(1).ratio_error(0) == math.inf
    assert np.isclose(geom_core.ApproxAnswer.epsapprox(9.0, 0.5).ratio_error(10), 0.1)


def test_constructor_validation():
    """
    Inverted objects and negative colours are rejected.
    """

    with pytest.raises(BadParamsError):
        geom_core.ColoredInterval(5, 4, 0)

    with pytest.raises(BadParamsError):
        geom_core.ColoredInterval(1, 4, -1)

    with pytest.raises(BadParamsError):
        geom_core.StabRect3S(3, 2, 0)

    with pytest.raises(BadParamsError):
        geom_core.Rect5(0, 1, 2, 1, 0)

    with pytest.raises(BadParamsError):
        geom_core.ColoredPoint((1, 2), -3)

    p = geom_core.ColoredPoint([1, 2, 3], 7)
    assert p.coords == (1, 2, 3)
    assert p.dim == 3


def test_rect5():
    """
    Check box containment and the lattice area.
    """

    box = geom_core.Rect5(0, 3, -1, 1, 5)

    assert box.contains((0, 0, 5))
    assert box.contains((3, 1, -100))
    assert not box.contains((4, 0, 0))
    assert not box.contains((1, 2, 0))
    assert not box.contains((1, 0, 6))
    assert box.lattice_area() == 12


def _random_rects(rng, n, span):
    rects = []

    for i in range(n):
        a, b = sorted(rng.integers(0, span, size=2))
        rects.append(geom_core.StabRect3S(int(a), int(b), int(rng.integers(0, span)), tag=i))

    return rects


def test_rank_space_reduce_preserves_containment():
    """
    Check that a rectangle contains a raw query iff its reduced version
    contains the query's position.
    """

    rng = np.random.default_rng(42)

    for n in [1, 5, 20, 50]:
        for span in [4, 30]:
            rects = _random_rects(rng, n, span)
            reduced, x_map, y_map = geom_core.rank_space_reduce(rects)

            assert len(reduced) == n
            assert all(r.tag == i for i, r in enumerate(reduced))
            assert all(0 <= r.x1 < r.x2 < 2 * n for r in reduced)

            for qx in np.arange(-1.0, span + 1.0, 0.5):
                for qy in np.arange(-1.0, span + 1.0, 0.5):
                    cx = x_map.position(qx)
                    cy = y_map.position(qy)

                    for raw, red in zip(rects, reduced):
                        before = raw.contains((qx, qy))
                        after = red.x1 < cx <= red.x2 and red.y < cy
                        assert before == after


@settings(max_examples=50, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.integers(-20, 20),
            st.integers(0, 10),
            st.integers(-20, 20),
            st.integers(0, 10),
            st.integers(-20, 20),
        ),
        min_size=1,
        max_size=12,
    ),
    st.tuples(
        st.integers(-22, 22), st.integers(-22, 22), st.integers(-22, 22)
    ),
)
def test_rank_space_reduce_rect5(raw, q):
    """
    Check the containment of boxes in rank space.
    """

    boxes = [geom_core.Rect5(x, x + w, y, y + h, z) for x, w, y, h, z in raw]
    reduced, (x_map, y_map, z_map) = geom_core.rank_space_reduce_rect5(boxes)

    cx = x_map.position(q[0])
    cy = y_map.position(q[1])
    cz = z_map.position(q[2])

    for box, red in zip(boxes, reduced):
        after = red.x1 < cx <= red.x2 and red.y1 < cy <= red.y2 and cz <= red.ztop
        assert box.contains(q) == after


def test_side_map_positions():
    """
    The vectorised positions agree with the scalar ones.
    """

    side_map = geom_core.SideMap([1, 1, 4, 7], [2, 5, 5, 9])
    values = [-1, 1, 1.5, 2, 4, 5, 6, 9, 10]

    expected = [side_map.position(v) for v in values]

    assert np.array_equal(side_map.positions(values), expected)
    assert side_map.size == 8


def test_predecessor():
    """
    Check the predecessor search including both ends.
    """

    keys = [1, 4, 9, 16]

    assert geom_core.predecessor(keys, 0) is None
    assert geom_core.predecessor(keys, 1) == 0
    assert geom_core.predecessor(keys, 5) == 1
    assert geom_core.predecessor(keys, 16) == 3
    assert geom_core.predecessor(keys, 100) == 3
    assert geom_core.predecessor([], 3) is None


def test_densify_colors():
    """
    Labels become dense ids in order of first appearance.
    """

    ids, table = geom_core.densify_colors(["red", "blue", "red", 7, "blue"])

    assert ids == [0, 1, 0, 2, 1]
    assert table == ["red", "blue", 7]

    assert geom_core.num_colors([]) == 0
    assert geom_core.num_colors([geom_core.ColoredPoint((0, 0), 4)]) == 5


if __name__ == "__main__":
    import pytest

    pytest.main([__file__])
