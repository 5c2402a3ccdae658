#
#   Geometric types, rank space and predecessor search.
#

from bisect import bisect_left, bisect_right
from collections import namedtuple
import math

import numpy as np

from colorcount.errors import BadParamsError

NEG_INF = -math.inf
POS_INF = math.inf

# kinds of approximate answers
EXACT = "exact"
CAPPROX = "capprox"
EPSAPPROX = "epsapprox"

# absolute slack when checking floating point contracts
CONTRACT_TOL = 1.0e-9


class ColoredPoint(namedtuple("ColoredPoint", ["coords", "color"])):
    """
    A coloured point with integer coordinates.
    """

    __slots__ = ()

    def __new__(cls, coords, color):
        if color < 0:
            raise BadParamsError("Colour ids are non-negative: {0}".format(color))

        return super(ColoredPoint, cls).__new__(cls, tuple(coords), int(color))

    @property
    def dim(self):
        return len(self.coords)


# the planar and spatial points share one type
ColoredPoint2 = ColoredPoint
ColoredPoint3 = ColoredPoint


class ColoredInterval(namedtuple("ColoredInterval", ["lo", "hi", "color"])):
    """
    A coloured closed interval [lo, hi].
    """

    __slots__ = ()

    def __new__(cls, lo, hi, color):
        if lo > hi:
            raise BadParamsError("Interval is inverted: {0}, {1}".format(lo, hi))
        if color < 0:
            raise BadParamsError("Colour ids are non-negative: {0}".format(color))

        return super(ColoredInterval, cls).__new__(cls, lo, hi, int(color))


class StabRect3S(namedtuple("StabRect3S", ["x1", "x2", "y", "tag"])):
    """
    The 3-sided rectangle [x1, x2] x [y, +inf).
    """

    __slots__ = ()

    def __new__(cls, x1, x2, y, tag=None):
        if x1 > x2:
            raise BadParamsError("Rectangle is inverted: {0}, {1}".format(x1, x2))

        return super(StabRect3S, cls).__new__(cls, x1, x2, y, tag)

    def contains(self, q):
        qx, qy = q
        return self.x1 <= qx <= self.x2 and self.y <= qy


class ColoredRect3S(namedtuple("ColoredRect3S", ["x1", "x2", "y", "color"])):
    """
    A coloured 3-sided rectangle [x1, x2] x [y, +inf).
    """

    __slots__ = ()

    def __new__(cls, x1, x2, y, color):
        if x1 > x2:
            raise BadParamsError("Rectangle is inverted: {0}, {1}".format(x1, x2))
        if color < 0:
            raise BadParamsError("Colour ids are non-negative: {0}".format(color))

        return super(ColoredRect3S, cls).__new__(cls, x1, x2, y, int(color))

    def contains(self, q):
        qx, qy = q
        return self.x1 <= qx <= self.x2 and self.y <= qy


class Rect5(namedtuple("Rect5", ["x1", "x2", "y1", "y2", "ztop", "tag"])):
    """
    The 5-sided box [x1, x2] x [y1, y2] x (-inf, ztop].

    The planar sides may be infinite.
    """

    __slots__ = ()

    def __new__(cls, x1, x2, y1, y2, ztop, tag=None):
        if x1 > x2 or y1 > y2:
            raise BadParamsError(
                "Box is inverted: [{0}, {1}] x [{2}, {3}]".format(x1, x2, y1, y2)
            )

        return super(Rect5, cls).__new__(cls, x1, x2, y1, y2, ztop, tag)

    def contains(self, q):
        qx, qy, qz = q
        return (
            self.x1 <= qx <= self.x2 and self.y1 <= qy <= self.y2 and qz <= self.ztop
        )

    def lattice_area(self):
        """
        The number of integer points in the planar projection.
        """

        res = (self.x2 - self.x1 + 1) * (self.y2 - self.y1 + 1)

        return res


class ApproxAnswer(namedtuple("ApproxAnswer", ["value", "kind", "param"])):
    """
    A returned count together with its contract.

    EXACT means value = k. CAPPROX with factor C means k lies in
    [value, C * value]. EPSAPPROX with parameter eps means value lies in
    [(1 - eps) k, (1 + eps) k].
    """

    __slots__ = ()

    @classmethod
    def exact(cls, k):
        return cls(k, EXACT, None)

    @classmethod
    def capprox(cls, z, factor):
        return cls(z, CAPPROX, factor)

    @classmethod
    def epsapprox(cls, value, eps):
        return cls(value, EPSAPPROX, eps)

    def holds(self, k):
        """
        Check the contract against the exact count.

        Parameters
        ----------
        k: int
            The exact count.

        Returns
        -------
        res: bool
            True if the contract is met.
        """

        if self.kind == EXACT:
            res = self.value == k
        elif self.kind == CAPPROX:
            res = (
                self.value - CONTRACT_TOL <= k <= self.param * self.value + CONTRACT_TOL
            )
        elif self.kind == EPSAPPROX:
            res = (
                (1.0 - self.param) * k - CONTRACT_TOL
                <= self.value
                <= (1.0 + self.param) * k + CONTRACT_TOL
            )
        else:
            raise NotImplementedError("Answer kind is unknown: {0}".format(self.kind))

        return res

    def ratio_error(self, k):
        """
        The relative deviation |value - k| / k.
        """

        if k == 0:
            if self.value == 0:
                return 0.0
            return math.inf

        res = abs(self.value - k) / float(k)

        return res


class ColoredReporter(object):
    """
    Capped colour reporting.

    report_colors(q, cap) returns distinct colour ids present in q. The
    list is complete if at most cap colours are present, otherwise it
    holds cap + 1 of them.
    """

    def report_colors(self, q, cap):
        raise NotImplementedError()

    def restricted(self, objects):
        """
        A reporter of the same kind over a subset of the objects.
        """

        raise NotImplementedError()

    def space_units(self):
        raise NotImplementedError()


class ColorApproximator(object):
    """
    Constant-factor colour count approximation in lower-bound form.

    approximate(q) returns an ApproxAnswer z of kind CAPPROX with
    k in [z, factor * z].
    """

    factor = None

    def approximate(self, q):
        raise NotImplementedError()

    def space_units(self):
        raise NotImplementedError()


class SideMap(namedtuple("SideMap", ["lows", "highs"])):
    """
    The sorted sides of one axis, used to route raw query coordinates to
    rank-space positions.

    A query's position is the number of sides that precede it: lower
    sides with value <= q and upper sides with value < q. A box with
    lower-side rank a and upper-side rank b contains the query iff
    a < position <= b.
    """

    __slots__ = ()

    def position(self, value):
        res = bisect_right(self.lows, value) + bisect_left(self.highs, value)

        return res

    def positions(self, values):
        """
        Vectorised version of position.
        """

        values = np.asarray(values, dtype=float)
        res = np.searchsorted(
            np.asarray(self.lows, dtype=float), values, side="right"
        ) + np.searchsorted(np.asarray(self.highs, dtype=float), values, side="left")

        return res

    @property
    def size(self):
        return len(self.lows) + len(self.highs)


def _side_ranks(lows, highs):
    """
    Rank the lower and upper sides of one axis.

    At equal values lower sides precede upper sides, and ties among sides
    of the same kind are broken by input order.
    """

    keys = [(v, 0, i) for i, v in enumerate(lows)] + [
        (v, 1, i) for i, v in enumerate(highs)
    ]
    keys.sort()

    rank_lo = [0] * len(lows)
    rank_hi = [0] * len(highs)

    for rank, (_, kind, i) in enumerate(keys):
        if kind == 0:
            rank_lo[i] = rank
        else:
            rank_hi[i] = rank

    side_map = SideMap(sorted(lows), sorted(highs))

    return rank_lo, rank_hi, side_map


def rank_space_reduce(rects):
    """
    Replace the coordinates of 3-sided rectangles by their ranks.

    Parameters
    ----------
    rects: list of StabRect3S
        The input rectangles. Duplicated sides are allowed.

    Returns
    -------
    reduced: list of StabRect3S
        The rectangles on the grid [2n] x [n], tags preserved.
    x_map: SideMap
        The sorted vertical sides.
    y_map: SideMap
        The sorted horizontal sides.
    """

    x_lo, x_hi, x_map = _side_ranks([r.x1 for r in rects], [r.x2 for r in rects])
    y_lo, _, y_map = _side_ranks([r.y for r in rects], [])

    reduced = [
        StabRect3S(x_lo[i], x_hi[i], y_lo[i], tag=r.tag) for i, r in enumerate(rects)
    ]

    return reduced, x_map, y_map


def rank_space_reduce_rect5(rects):
    """
    Replace the coordinates of 5-sided boxes by their ranks.

    Returns
    -------
    reduced: list of Rect5
        The boxes on the grid [2n] x [2n] x [n].
    maps: tuple of SideMap
        The x, y and z side maps. The z axis only has upper sides.
    """

    x_lo, x_hi, x_map = _side_ranks([r.x1 for r in rects], [r.x2 for r in rects])
    y_lo, y_hi, y_map = _side_ranks([r.y1 for r in rects], [r.y2 for r in rects])
    _, z_hi, z_map = _side_ranks([], [r.ztop for r in rects])

    reduced = [
        Rect5(x_lo[i], x_hi[i], y_lo[i], y_hi[i], z_hi[i], tag=r.tag)
        for i, r in enumerate(rects)
    ]

    return reduced, (x_map, y_map, z_map)


def predecessor(sorted_keys, q):
    """
    Find the largest key that is at most q.

    Parameters
    ----------
    sorted_keys: list
        Strictly ascending keys.
    q: number
        The query value.

    Returns
    -------
    index: int or None
        The index of the predecessor, None if every key exceeds q.
    """

    index = bisect_right(sorted_keys, q) - 1

    if index < 0:
        return None

    return index


def double(value):
    """
    Map a data coordinate into doubled-integer space.
    """

    if math.isinf(value):
        return value

    return 2 * int(value)


def snap_query(value):
    """
    Map a real query coordinate into doubled-integer space.

    Integers map to 2q and everything strictly between two integers maps
    to the odd number in between, which is equivalent for integer data.
    """

    if math.isinf(value):
        return value

    floor = math.floor(value)

    if floor == value:
        return 2 * int(floor)

    return 2 * int(floor) + 1


def snap_point(q):
    return tuple(snap_query(v) for v in q)


def num_colors(objects):
    """
    The size of the colour table, max colour id + 1.
    """

    if len(objects) == 0:
        return 0

    res = max(obj.color for obj in objects) + 1

    return res


def densify_colors(labels):
    """
    Map arbitrary colour labels to dense 0-based colour ids.

    Parameters
    ----------
    labels: list
        Hashable labels, one per object.

    Returns
    -------
    ids: list of int
        The colour id of each object, in order of first appearance.
    table: list
        The label of each colour id.
    """

    lookup = {}
    table = []
    ids = []

    for label in labels:
        if label not in lookup:
            lookup[label] = len(table)
            table.append(label)
        ids.append(lookup[label])

    return ids, table
