import numpy as np
import pytest

from colorcount.config import Config
from colorcount.errors import BadParamsError, QueryMalformedError
from colorcount.geom_core import EXACT, ColoredPoint
import colorcount.apps_nd as apps_nd
import colorcount.oracle as oracle


def random_points(n, colors, span, dim, seed=42):
    rng = np.random.default_rng(seed)

    res = [
        ColoredPoint(rng.integers(0, span, size=dim), int(rng.integers(0, colors)))
        for _ in range(n)
    ]

    return res


def test_range_tree_emptiness():
    """
    Check the emptiness decision against a scan in one to four
    dimensions.
    """

    rng = np.random.default_rng(1)

    for dim in apps_nd.DIMENSIONS:
        for n in [1, 5, 40]:
            coords = rng.integers(0, 6, size=(n, dim))
            tree = apps_nd.RangeTree(coords)

            assert tree.dim == dim
            assert tree.entries >= n

            for _ in range(100):
                a = rng.integers(-1, 7, size=dim)
                b = rng.integers(-1, 7, size=dim)
                lo = np.minimum(a, b)
                hi = np.maximum(a, b)

                inside = np.all((coords >= lo) & (coords <= hi), axis=1)

                assert tree.is_empty(lo, hi) == (not np.any(inside))

    empty = apps_nd.RangeTree(np.zeros((0, 2)))

    assert empty.is_empty([0, 0], [1, 1])

    with pytest.raises(BadParamsError):
        apps_nd.RangeTree([1, 2, 3])


def test_colored_reporter():
    """
    The capped report matches the oracle and touches few nodes of the
    colour tree.
    """

    for dim in [1, 2, 3]:
        points = random_points(40, 10, 6, dim, seed=dim)
        reporter = apps_nd.build_colored_reporter_rd(points)

        assert reporter.dim == dim
        assert reporter.space_units() >= len(points)

        universe = oracle.enumerate_queries(oracle.ORTHO_RD, points, max_queries=300)
        before = dict(vars(reporter))

        for q in universe.queries:
            expected = oracle.exact_colored_report(oracle.ORTHO_RD, points, q)

            assert sorted(reporter.report_colors(q, 100)) == expected

            for cap in [0, 2, 5]:
                colors, tests = reporter.search(q, cap)

                assert colors == reporter.report_colors(q, cap)
                assert len(colors) == min(len(expected), cap + 1)
                assert set(colors) <= set(expected)
                assert tests <= 3 * reporter.height * len(colors) + 1

        # queries leave the built structure untouched
        assert vars(reporter) == before


def test_colored_reporter_errors():
    """
    Bad dimensions and malformed queries are rejected.
    """

    with pytest.raises(BadParamsError):
        apps_nd.ColoredReporterRD([])

    with pytest.raises(BadParamsError):
        apps_nd.ColoredReporterRD([ColoredPoint((1, 2, 3, 4, 5), 0)])

    empty = apps_nd.ColoredReporterRD([], dim=2)

    assert empty.report_colors(((0, 0), (1, 1)), 3) == []
    assert empty.space_units() == 0

    reporter = apps_nd.ColoredReporterRD(random_points(10, 3, 5, 2))

    with pytest.raises(QueryMalformedError):
        reporter.report_colors(((0, 0, 0), (1, 1, 1)), 3)

    with pytest.raises(QueryMalformedError):
        reporter.report_colors(((2, 0), (1, 1)), 3)


def check_orthocount(dim, n, colors, span, seed):
    eps = 0.5
    points = random_points(n, colors, span, dim, seed=seed)
    counter = apps_nd.build_colored_orthocount_rd(points, dim, eps, Config(c1=1.0))

    universe = oracle.enumerate_queries(oracle.ORTHO_RD, points)
    truth = oracle.colored_counts(oracle.ORTHO_RD, points, universe)

    for q, k in zip(universe.queries, truth):
        res = counter.query(q)

        assert res.holds(k)

        if res.kind == EXACT:
            assert res.value == k
        else:
            assert (1.0 - eps) * res.value <= k + 1.0e-9
            assert k <= (1.0 + eps) ** 2 * res.value + 1.0e-9


def test_orthocount_2d():
    """
    The planar counter meets its contract on every distinct query.
    """

    check_orthocount(2, 30, 20, 8, 3)


@pytest.mark.slow
def test_orthocount_3d():
    """
    The spatial counter meets its contract on every distinct query.
    """

    check_orthocount(3, 20, 16, 5, 4)


if __name__ == "__main__":
    import pytest

    pytest.main([__file__])
