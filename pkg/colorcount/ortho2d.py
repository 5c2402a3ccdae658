#
#   Coloured 3-sided and 4-sided range counting in the plane.
#

from bisect import bisect_left, bisect_right
import logging
import math

import numpy as np

from colorcount.config import resolve
from colorcount.errors import QueryMalformedError
from colorcount.geom_core import (
    ApproxAnswer,
    ColorApproximator,
    ColoredPoint,
    ColoredReporter,
    snap_point,
)
from colorcount.intervaltree import IntervalTree
import colorcount.oracle as oracle
from colorcount.reductions import build_reduction1
from colorcount.stab3d import RectStabIndex5, phi_decompose

log = logging.getLogger(__name__)

AXIS_KEYS = {
    0: (lambda r: r.x1, lambda r: r.x2),
    1: (lambda r: r.y1, lambda r: r.y2),
}


def interval_tree_decompose(rects, q, axis=0):
    """
    Break a box stabbing query into one-sided sub-queries on one axis.

    Parameters
    ----------
    rects: list of Rect5
        The boxes, bounded on the axis.
    q: tuple
        The query point.
    axis: int
        0 for x, 1 for y.

    Returns
    -------
    subqueries: list of (str, list of Rect5)
        The side and the boxes of every node on the search path. On side
        LEFT a box is stabbed iff its lower side on the axis is at most the
        query coordinate and its other sides contain the query, on side
        RIGHT the upper side decides instead.
    """

    lo_key, hi_key = AXIS_KEYS[axis]

    tree = IntervalTree(rects, lo_key, hi_key)

    res = tree.decompose(q[axis])

    return res


def _check_3sided(q):
    x1, x2, y = q

    if x1 > x2:
        raise QueryMalformedError("Query is inverted: x1={0} > x2={1}".format(x1, x2))

    return x1, x2, y


def lift_point(p):
    """
    Lift a planar point to space so that 3-sided range queries become
    dominance queries.
    """

    px, py = p.coords

    res = ColoredPoint((px, -px, py), p.color)

    return res


def lift_query(q):
    x1, x2, y = _check_3sided(q)

    return (x1, -x2, y)


class LiftedStabIndex(object):
    """
    Coloured 3-sided range search as exact 5-sided box stabbing.

    Every colour present in a query contributes exactly one stabbed box.
    """

    def __init__(self, points):
        self.points = list(points)
        self.decomposition = phi_decompose([lift_point(p) for p in self.points])
        self.index = RectStabIndex5(self.decomposition.all)

    def count(self, q):
        res = self.index.count(snap_point(lift_query(q)))

        return res

    def report(self, q, cap):
        boxes = self.index.report(snap_point(lift_query(q)), cap)

        res = [box.tag for box in boxes]

        return res

    def space_units(self):
        return self.index.space_units()


class InitialTwoApprox(ColorApproximator):
    """
    2-approximate coloured 3-sided range counting.

    The box stabbing count is exact, so the value is k.
    """

    factor = 2.0

    def __init__(self, points):
        self.index = LiftedStabIndex(points)

    def approximate(self, q):
        res = ApproxAnswer.capprox(self.index.count(q), self.factor)

        return res

    def space_units(self):
        return self.index.space_units()


def build_initial_2approx(points):
    return InitialTwoApprox(points)


class Colored3SidedReporter(ColoredReporter):
    """
    Capped colour reporting for 3-sided queries [x1, x2] x [y, inf).
    """

    def __init__(self, points):
        self.index = LiftedStabIndex(points)

    def report_colors(self, q, cap):
        return self.index.report(q, cap)

    def restricted(self, objects):
        return Colored3SidedReporter(objects)

    def space_units(self):
        return self.index.space_units()


def colored_3sided_report(points, q, cap):
    """
    Report the colours present in a 3-sided query, complete if there are
    at most cap of them and cap + 1 of them otherwise.
    """

    reporter = Colored3SidedReporter(points)

    res = reporter.report_colors(q, cap)

    return res


def bucket_size(n, config):
    if config.bucket_size is not None:
        return int(config.bucket_size)

    res = max(4, int(math.ceil(math.log2(max(n, 2)) ** 2)))

    return res


def sketch_values(ys, colors):
    """
    The 2^0, 2^1, ..-th largest of the per-colour maximum y.
    """

    if len(ys) == 0:
        return np.zeros(0)

    order = np.lexsort((-ys, colors))
    first = np.ones(len(order), dtype=bool)
    first[1:] = colors[order][1:] != colors[order][:-1]

    maxima = np.sort(ys[order][first])[::-1]
    ranks = 2 ** np.arange(int(math.floor(math.log2(len(maxima)))) + 1) - 1

    res = maxima[ranks]

    return res


def scan_sketch(values, y):
    """
    The largest 2^j whose sketch entry is at least y, or 0.
    """

    hits = int(np.count_nonzero(values >= y))

    if hits == 0:
        return 0

    return 2 ** (hits - 1)


class BucketedCApprox(ColorApproximator):
    """
    8-approximate coloured 3-sided range counting.

    The points are cut into buckets of consecutive x. Every bucket has an
    initial 2-approximation and a balanced tree over the buckets stores,
    for each bucket u and proper ancestor v, sketches of the per-colour
    maxima of the buckets between u and the far end of the child of v
    holding u. A query spanning buckets u_l < u_r is split at their least
    common ancestor into four parts, each answered within a factor 2. A
    colour may be counted by all four, so the sum is divided by 4.

    Parameters
    ----------
    points: list of ColoredPoint
        Planar coloured points.
    config: Config or None
        The constants.
    """

    factor = 8.0

    def __init__(self, points, config=None):
        self.config = resolve(config)

        order = sorted(range(len(points)), key=lambda i: points[i].coords[0])

        self.points = [points[i] for i in order]
        self.n = len(self.points)
        self.xs = [p.coords[0] for p in self.points]
        self.ys = np.array([p.coords[1] for p in self.points], dtype=float)
        self.colors = np.array([p.color for p in self.points], dtype=int)

        self.bucket = bucket_size(self.n, self.config)
        self.num_buckets = max(1, int(math.ceil(self.n / float(self.bucket))))
        self.width = 1

        while self.width < self.num_buckets:
            self.width *= 2

        self.structures = [
            InitialTwoApprox(self.points[b * self.bucket : (b + 1) * self.bucket])
            for b in range(self.num_buckets)
        ]

        self.left_sketches = {}
        self.right_sketches = {}
        self._build_sketches()

        log.debug(
            "Bucketed approximation: n={0}, bucket={1}, buckets={2}".format(
                self.n, self.bucket, self.num_buckets
            )
        )

    def _span(self, node):
        """
        The buckets below a tree node.
        """

        level = node.bit_length() - 1
        size = self.width >> level
        first = (node - (1 << level)) * size

        return first, first + size - 1

    def _points_of(self, first, last):
        last = min(last, self.num_buckets - 1)

        if first > last:
            return self.ys[:0], self.colors[:0]

        start = first * self.bucket
        stop = min(self.n, (last + 1) * self.bucket)

        return self.ys[start:stop], self.colors[start:stop]

    def _build_sketches(self):
        for u in range(self.num_buckets):
            child = self.width + u

            while child > 1:
                v = child // 2
                first, last = self._span(child)

                ys, colors = self._points_of(first, u - 1)
                self.left_sketches[(u, v)] = sketch_values(ys, colors)

                ys, colors = self._points_of(u + 1, last)
                self.right_sketches[(u, v)] = sketch_values(ys, colors)

                child = v

    def lca(self, u, w):
        a = self.width + u
        b = self.width + w

        while a != b:
            a //= 2
            b //= 2

        return a

    def approximate(self, q):
        x1, x2, y = _check_3sided(q)

        first = bisect_left(self.xs, x1)
        last = bisect_right(self.xs, x2) - 1

        if first > last:
            return ApproxAnswer.capprox(0, self.factor)

        u_l = first // self.bucket
        u_r = last // self.bucket

        if u_l == u_r:
            z = self.structures[u_l].approximate((x1, x2, y)).value
            return ApproxAnswer.capprox(z, self.factor)

        v = self.lca(u_l, u_r)

        total = (
            self.structures[u_l].approximate((x1, math.inf, y)).value
            + self.structures[u_r].approximate((-math.inf, x2, y)).value
            + scan_sketch(self.right_sketches[(u_l, v)], y)
            + scan_sketch(self.left_sketches[(u_r, v)], y)
        )

        res = ApproxAnswer.capprox(total / 4.0, self.factor)

        return res

    def space_units(self):
        res = sum(s.space_units() for s in self.structures)
        res += sum(len(s) for s in self.left_sketches.values())
        res += sum(len(s) for s in self.right_sketches.values())

        return res


def build_bucketed_capprox(points, config=None):
    return BucketedCApprox(points, config)


def flip_point(p):
    px, py = p.coords

    return ColoredPoint((px, -py), p.color)


class YRangeNode(object):
    def __init__(self, lo, hi, up, down, left, right):
        self.lo = lo
        self.hi = hi
        self.up = up
        self.down = down
        self.left = left
        self.right = right


class YRangeTree(object):
    """
    Balanced tree over the points sorted by y that splits a 4-sided query
    into two 3-sided queries.

    Every node holds a structure over its points for queries unbounded
    upwards and one over the reflected points for queries unbounded
    downwards, both built by the build function.

    Parameters
    ----------
    points: list of ColoredPoint
        Planar coloured points.
    build: func
        Called with a list of points, returns a 3-sided structure.
    """

    def __init__(self, points, build):
        self.points = sorted(points, key=lambda p: p.coords[1])
        self.ys = [p.coords[1] for p in self.points]
        self.build = build
        self.num_nodes = 0
        self.root = self._build(0, len(self.points))

    def _build(self, lo, hi):
        if lo >= hi:
            return None

        members = self.points[lo:hi]
        self.num_nodes += 1

        up = self.build(members)
        down = self.build([flip_point(p) for p in members])

        if hi - lo == 1:
            return YRangeNode(lo, hi, up, down, None, None)

        mid = (lo + hi) // 2

        node = YRangeNode(
            lo, hi, up, down, self._build(lo, mid), self._build(mid, hi)
        )

        return node

    def split(self, q):
        """
        The 3-sided sub-queries of q = [x1, x2] x [y1, y2].

        Returns
        -------
        subqueries: list of (object, tuple)
            The structure and its 3-sided query, at most two of them.
        """

        x1, x2, y1, y2 = q

        if x1 > x2 or y1 > y2:
            raise QueryMalformedError("Query is inverted: {0}".format(q))

        first = bisect_left(self.ys, y1)
        last = bisect_right(self.ys, y2) - 1

        if first > last:
            return []

        node = self.root

        while node.hi - node.lo > 1:
            mid = (node.lo + node.hi) // 2

            if last < mid:
                node = node.left
            elif first >= mid:
                node = node.right
            else:
                return [
                    (node.left.up, (x1, x2, y1)),
                    (node.right.down, (x1, x2, -y2)),
                ]

        return [(node.up, (x1, x2, y1))]

    def nodes(self):
        stack = [self.root] if self.root is not None else []

        while len(stack) > 0:
            node = stack.pop()
            yield node
            stack.extend(c for c in [node.left, node.right] if c is not None)

    def space_units(self):
        res = sum(
            node.up.space_units() + node.down.space_units() for node in self.nodes()
        )

        return res


class Colored4SidedReporter(ColoredReporter):
    """
    Capped colour reporting for 4-sided queries [x1, x2] x [y1, y2].

    The colours of the two 3-sided sub-queries are merged.
    """

    def __init__(self, points):
        self.tree = YRangeTree(points, Colored3SidedReporter)

    def report_colors(self, q, cap):
        found = set()

        for reporter, sub in self.tree.split(q):
            found.update(reporter.report_colors(sub, cap))

        res = sorted(found)[: cap + 1]

        return res

    def restricted(self, objects):
        return Colored4SidedReporter(objects)

    def space_units(self):
        return self.tree.space_units()


class Colored4SidedApprox(ColorApproximator):
    """
    16-approximate coloured 4-sided range counting.

    The two 3-sided answers are 8-approximations of two colour sets whose
    union is the answer, so their sum is halved.
    """

    factor = 16.0

    def __init__(self, points, config=None):
        config = resolve(config)

        self.tree = YRangeTree(points, lambda members: BucketedCApprox(members, config))

    def approximate(self, q):
        parts = self.tree.split(q)

        total = sum(approx.approximate(sub).value for approx, sub in parts)

        if len(parts) == 2:
            total /= 2.0

        res = ApproxAnswer.capprox(total, self.factor)

        return res

    def space_units(self):
        return self.tree.space_units()


def build_colored_3sided(points, eps, config=None, universe=None):
    """
    (1 + eps)-approximate coloured 3-sided range counting.

    Capped reporting and the 8-approximation are composed by Reduction-I
    with C = 64.

    Raises
    ------
    SuitabilityError
        If a refinement sample cannot be certified.
    """

    points = list(points)

    res = build_reduction1(
        oracle.RANGE3S_2D,
        points,
        Colored3SidedReporter(points),
        BucketedCApprox(points, config),
        eps,
        config=config,
        universe=universe,
    )

    return res


def build_colored_4sided(points, eps, config=None, universe=None):
    """
    (1 + eps)-approximate coloured 4-sided range counting.

    Raises
    ------
    SuitabilityError
        If a refinement sample cannot be certified.
    """

    points = list(points)

    res = build_reduction1(
        oracle.RANGE4S_2D,
        points,
        Colored4SidedReporter(points),
        Colored4SidedApprox(points, config),
        eps,
        config=config,
        universe=universe,
    )

    return res
