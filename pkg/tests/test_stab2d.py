import math

import numpy as np
import pytest

from colorcount.config import Config
from colorcount.errors import BadParamsError, QueryOutOfGridError, SettingUnsupportedError
from colorcount.geom_core import (
    EPSAPPROX,
    EXACT,
    ColoredInterval,
    ColoredPoint,
    ColoredRect3S,
    StabRect3S,
    rank_space_reduce,
)
import colorcount.oracle as oracle
import colorcount.stab2d as stab2d


def random_rects(n, span, seed=42):
    rng = np.random.default_rng(seed)
    rects = []

    for i in range(n):
        a, b = sorted(rng.integers(0, span, size=2))
        rects.append(StabRect3S(int(a), int(b), int(rng.integers(0, span)), tag=i))

    return rects


def random_colored(setting, n, colors, span=20, seed=42):
    rng = np.random.default_rng(seed)
    res = []

    for _ in range(n):
        color = int(rng.integers(0, colors))
        a, b = sorted(rng.integers(0, span, size=2))

        if setting == oracle.INTERVAL_STAB_1D:
            res.append(ColoredInterval(int(a), int(b), color))
        elif setting == oracle.DOM2D:
            res.append(ColoredPoint((int(a), int(rng.integers(0, span))), color))
        else:
            res.append(ColoredRect3S(int(a), int(b), int(rng.integers(0, span)), color))

    return res


def test_union_decompose_color():
    """
    The pieces are disjoint and cover exactly the union of the input.
    """

    rng = np.random.default_rng(1)

    for n in [1, 2, 5, 20]:
        for _ in range(10):
            rects = random_rects(n, 15, seed=int(rng.integers(0, 2**31)))
            pieces = stab2d.union_decompose_color(rects)

            for x in range(-1, 16):
                for y in np.arange(-1.0, 16.0, 0.5):
                    inside = any(r.contains((x, y)) for r in rects)
                    hits = sum(1 for p in pieces if p.contains((x, y)))

                    assert hits == int(inside)

    assert stab2d.union_decompose_color([]) == []


def test_union_decomposition_counts_colours():
    """
    After embedding, every colour present in a query has exactly one
    piece containing the snapped query, every other colour none.
    """

    for setting in stab2d.EMBEDDABLE:
        objects = random_colored(setting, 40, 6)
        rects, adapter = stab2d.embed_setting(setting, objects, doubled=True)
        decomposition = stab2d.union_decompose(rects)

        universe = oracle.enumerate_queries(setting, objects)
        presence = oracle.presence_matrix(setting, objects, universe, 6)

        for i, q in enumerate(universe.queries):
            point = adapter(q)

            for color in range(6):
                pieces = decomposition.per_color.get(color, [])
                hits = sum(1 for p in pieces if p.contains(point))

                assert hits == int(presence[i, color])

    with pytest.raises(SettingUnsupportedError):
        stab2d.embed_setting(oracle.DOM3D, [])


def test_shallow_cutting():
    """
    Check the size of the cutting, the lower bound outside the cells,
    the size of the conflict lists and that they are complete.
    """

    for n in [8, 33, 64]:
        reduced, _, _ = rank_space_reduce(random_rects(n, 3 * n, seed=n))
        counts = oracle.grid_counts_3s(reduced, 2 * n, n)

        previous = None

        for t in [1, 2, 4, 8]:
            cutting = stab2d.build_shallow_cutting(reduced, t)

            assert len(cutting) <= math.ceil(2 * n / t)

            for conflicts in cutting.conflict_lists:
                assert len(conflicts) <= 2 * t

            for cx in range(1, 2 * n + 1):
                for cy in range(n + 1):
                    index = cutting.locate(cx, cy)

                    if index is None:
                        assert counts[cx, cy] >= t
                        continue

                    members = [reduced[i] for i in cutting.conflict_lists[index]]
                    k = sum(1 for r in members if r.x1 < cx <= r.x2 and r.y < cy)

                    assert k == counts[cx, cy]

            # the cells of t are nested in the cells of 2t
            if previous is not None and previous.level * 2 == t:
                for r, cell in enumerate(previous.cells):
                    assert cell.ytop <= cutting.cells[r // 2].ytop

            previous = cutting

    with pytest.raises(BadParamsError):
        stab2d.build_shallow_cutting([], 0)


def test_level_ladder():
    """
    The outcome of the ladder brackets the exact count.
    """

    n = 64
    reduced, _, _ = rank_space_reduce(random_rects(n, 200, seed=5))
    counts = oracle.grid_counts_3s(reduced, 2 * n, n)

    t = 2
    ladder = stab2d.build_level_ladder(reduced, t, 16)

    outcomes = set()

    for cx in range(2 * n + 1):
        for cy in range(n + 1):
            res = stab2d.query_level_ladder(ladder, cx, cy)
            k = counts[cx, cy]
            outcomes.add(res.status)

            if res.status == stab2d.BELOW_BASE:
                assert k < 2 * t
            elif res.status == stab2d.ABOVE_TOP:
                assert k >= 16
            else:
                assert res.answer.holds(k)
                assert res.answer.param == 4

    assert stab2d.BRACKET in outcomes

    for cx, cy in [(2 * n + 1, 0), (0, n + 1), (-1, 0), (1.5, 1)]:
        with pytest.raises(QueryOutOfGridError):
            stab2d.query_level_ladder(ladder, cx, cy)

    with pytest.raises(BadParamsError):
        stab2d.build_level_ladder(reduced, 2, 12)


def test_table_level():
    """
    Check L = ceil(sqrt(log2 n)).
    """

    assert stab2d.table_level(1) == 1
    assert stab2d.table_level(2) == 1
    assert stab2d.table_level(16) == 2
    assert stab2d.table_level(1024) == 4


def test_canonical_labels():
    """
    Labels ignore the input order and the absolute coordinates.
    """

    rects = random_rects(10, 30, seed=9)
    shifted = [StabRect3S(r.x1 + 100, r.x2 + 100, r.y - 50) for r in rects]

    label = stab2d.canonicalize_conflict_list(rects)

    assert stab2d.canonicalize_conflict_list(rects[::-1]) == label
    assert stab2d.canonicalize_conflict_list(shifted) == label
    assert stab2d.canonicalize_conflict_list(rects[:9]) != label


def test_shared_table():
    """
    The table is exact inside its cutting and the count is at least L
    outside, with and without table lookups.
    """

    n = 48
    reduced, _, _ = rank_space_reduce(random_rects(n, 100, seed=3))
    counts = oracle.grid_counts_3s(reduced, 2 * n, n)

    for min_n in [16, 1000]:
        table = stab2d.build_shared_table(reduced, Config(shared_table_min_n=min_n))

        assert table.use_table == (min_n <= n)
        assert table.level == stab2d.table_level(n)

        for cx in range(2 * n + 1):
            for cy in range(n + 1):
                res = stab2d.query_shared_table(table, cx, cy)

                if res.status == stab2d.TABLE_HIT:
                    assert res.answer.value == counts[cx, cy]
                else:
                    assert counts[cx, cy] >= table.level

        if table.use_table:
            assert 1 <= table.num_labels() <= len(table.cutting)


def test_stab_counter_exact_regime():
    """
    Without sampling every answer is exact, for positions and raw
    queries.
    """

    n = 64
    rects = random_rects(n, 90, seed=21)
    counter = stab2d.build_stab_counter(rects, 0.5, Config(c1=50.0))

    assert len(counter.samples) == 0

    counts = oracle.grid_counts_3s(counter.reduced, 2 * n, n)

    for cx in range(2 * n + 1):
        for cy in range(n + 1):
            res = counter.query_position(cx, cy)

            assert res.kind == EXACT
            assert res.value == counts[cx, cy]

    rng = np.random.default_rng(4)

    for q in rng.uniform(-5.0, 95.0, size=(300, 2)):
        expected = sum(1 for r in rects if r.contains(q))
        assert counter.query(q).value == expected

    for cx, cy in [(2 * n + 1, 1), (1, n + 1), (-1, 0)]:
        with pytest.raises(QueryOutOfGridError):
            counter.query_position(cx, cy)


def test_stab_counter_sampled_regime():
    """
    With sampled levels every answer meets its contract and large counts
    go through the samples.
    """

    n = 256
    eps = 1.0
    rects = random_rects(n, 1000, seed=8)
    counter = stab2d.build_stab_counter(rects, eps, Config(c1=2.0))

    assert len(counter.samples) > 0
    assert counter.attempts >= len(counter.samples)
    assert counter.sampled_objects() > 0
    assert counter.space_units() > 0

    counts = oracle.grid_counts_3s(counter.reduced, 2 * n, n)
    kinds = set()

    for cx in range(0, 2 * n + 1, 3):
        for cy in range(0, n + 1, 3):
            k = counts[cx, cy]
            res = counter.query_position(cx, cy)
            kinds.add(res.kind)

            assert res.holds(k)

            if k <= 1:
                assert res.value == k

    assert EPSAPPROX in kinds
    assert EXACT in kinds


def test_colored_counter():
    """
    The coloured counter meets its contract on every distinct query and
    is exact for counts of zero and one.
    """

    for setting in stab2d.EMBEDDABLE:
        objects = random_colored(setting, 80, 30, span=60, seed=17)
        counter = stab2d.build_colored_counter(setting, objects, 1.0)

        universe = oracle.enumerate_queries(setting, objects)
        truth = oracle.colored_counts(setting, objects, universe)

        for q, k in zip(universe.queries, truth):
            res = counter.query(q)

            assert res.holds(k)

            if k <= 1:
                assert res.value == k

        assert counter.space_units() > 0


def test_empty_counter():
    """
    An empty input counts zero.
    """

    counter = stab2d.build_stab_counter([], 0.5)

    assert counter.query((3, 4)) == counter.query_position(0, 0)
    assert counter.query((3, 4)).value == 0
    assert counter.space_units() == 0


def crossing_rects(n, span, seed=42):
    """
    Rectangles that all span the middle column, so that counts near the
    top of it reach n.
    """

    rng = np.random.default_rng(seed)

    res = [
        StabRect3S(
            int(rng.integers(0, span // 2)),
            int(rng.integers(span // 2, span)),
            int(rng.integers(0, span)),
            tag=i,
        )
        for i in range(n)
    ]

    return res


@pytest.mark.slow
def test_stab_counter_small_eps():
    """
    At small eps and large n the answers meet their contract on random
    positions and on the heaviest ones.
    """

    for n, eps, sampled in [(1024, 0.25, True), (2048, 0.1, False)]:
        rects = crossing_rects(n // 2, 8 * n, seed=n) + random_rects(
            n - n // 2, 8 * n, seed=n + 1
        )
        counter = stab2d.build_stab_counter(rects, eps)

        assert len(counter.samples) > 0

        counts = oracle.grid_counts_3s(counter.reduced, 2 * n, n)

        rng = np.random.default_rng(n)
        positions = list(
            zip(
                rng.integers(0, 2 * n + 1, size=4000),
                rng.integers(0, n + 1, size=4000),
            )
        )

        heaviest = np.argsort(counts, axis=None)[-500:]
        positions += list(zip(*np.unravel_index(heaviest, counts.shape)))

        kinds = set()

        for cx, cy in positions:
            k = int(counts[cx, cy])
            res = counter.query_position(int(cx), int(cy))
            kinds.add(res.kind)

            assert res.holds(k)

            if k <= 1:
                assert res.value == k

        if sampled:
            assert EPSAPPROX in kinds


@pytest.mark.slow
def test_colored_counter_small_eps():
    """
    The coloured counters meet their contract at eps = 0.25 with more
    colours than the sampling threshold.
    """

    for setting in stab2d.EMBEDDABLE:
        objects = random_colored(setting, 600, 400, span=40, seed=23)
        counter = stab2d.build_colored_counter(setting, objects, 0.25)

        universe = oracle.enumerate_queries(setting, objects)
        truth = oracle.colored_counts(setting, objects, universe)

        for q, k in zip(universe.queries, truth):
            res = counter.query(q)

            assert res.holds(k)

            if k <= 1:
                assert res.value == k


if __name__ == "__main__":
    import pytest

    pytest.main([__file__])
