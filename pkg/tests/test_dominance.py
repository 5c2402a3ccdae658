import math

import numpy as np

from colorcount.dominance import DominanceIndex
from colorcount.intervaltree import LEFT, RIGHT, IntervalTree


def test_dominance_against_brute_force():
    """
    Check counting and reporting against a direct scan.
    """

    rng = np.random.default_rng(42)

    for dim in [1, 2, 3]:
        for n in [0, 1, 10, 100]:
            points = rng.integers(0, 20, size=(n, dim))
            index = DominanceIndex(points, list(range(n)))

            assert len(index) == n

            for q in rng.integers(-1, 21, size=(50, dim)):
                expected = [i for i in range(n) if np.all(points[i] <= q)]

                assert index.count(q) == len(expected)
                assert sorted(index.report(q)) == expected

                for cap in [0, 2, 5]:
                    capped = index.report(q, cap)
                    assert len(capped) == min(len(expected), cap + 1)
                    assert set(capped) <= set(expected)


def test_dominance_infinite_coordinates():
    """
    Infinite coordinates are dominated or not as expected.
    """

    points = [(-math.inf, 0.0), (1.0, math.inf), (2.0, -math.inf)]
    index = DominanceIndex(points, ["a", "b", "c"])

    assert sorted(index.report((0.0, 0.0))) == ["a"]
    assert sorted(index.report((5.0, 5.0))) == ["a", "c"]
    assert index.count((math.inf, math.inf)) == 3


def test_interval_tree_decompose():
    """
    The sub-queries of a stabbing query are disjoint and together hold
    exactly the stabbed intervals.
    """

    rng = np.random.default_rng(7)

    for n in [1, 5, 50, 200]:
        items = []

        for i in range(n):
            a, b = sorted(rng.integers(0, 100, size=2))
            items.append((int(a), int(b), i))

        tree = IntervalTree(items, lambda t: t[0], lambda t: t[1])

        assert tree.depth() <= 2 * math.ceil(math.log2(2 * n + 1)) + 1

        for value in np.arange(-1.0, 101.0, 0.5):
            found = []

            for side, members in tree.decompose(value):
                assert side in [LEFT, RIGHT]

                if side == LEFT:
                    found.extend(t[2] for t in members if t[0] <= value)
                else:
                    found.extend(t[2] for t in members if t[1] >= value)

            expected = [t[2] for t in items if t[0] <= value <= t[1]]

            assert len(found) == len(set(found))
            assert sorted(found) == sorted(expected)


def test_interval_tree_empty():
    """
    An empty tree has no sub-queries.
    """

    tree = IntervalTree([], lambda t: t[0], lambda t: t[1])

    assert tree.decompose(3.0) == []
    assert tree.depth() == 0


if __name__ == "__main__":
    import pytest

    pytest.main([__file__])
