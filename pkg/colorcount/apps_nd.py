#
#   Coloured orthogonal range counting in d dimensions.
#

import logging

import numpy as np

from colorcount.errors import BadParamsError, QueryMalformedError
from colorcount.geom_core import ColoredReporter
import colorcount.oracle as oracle
from colorcount.reductions import build_reduction2

log = logging.getLogger(__name__)

DIMENSIONS = [1, 2, 3, 4]


class RangeTreeNode(object):
    def __init__(self, lo, hi, aux, left=None, right=None):
        self.lo = lo
        self.hi = hi
        self.aux = aux
        self.left = left
        self.right = right


class RangeTree(object):
    """
    Orthogonal range emptiness in d dimensions.

    A layered range tree without fractional cascading. Every node on one
    axis holds a tree over its points on the next axis, the last axis is
    a sorted array.

    Parameters
    ----------
    coords: array_like
        The points, shape (m, d).
    """

    def __init__(self, coords):
        coords = np.asarray(coords, dtype=float)

        if coords.ndim != 2:
            raise BadParamsError("Points must form a 2d array: {0}".format(coords.shape))

        self.dim = coords.shape[1]
        self.size = len(coords)
        self.entries = 0
        self.root = self._build(coords, 0) if self.size > 0 else None

    def _build(self, coords, axis):
        self.entries += len(coords)

        if axis == self.dim - 1:
            return np.sort(coords[:, axis])

        coords = coords[np.argsort(coords[:, axis], kind="stable")]
        lo = coords[0, axis]
        hi = coords[-1, axis]
        aux = self._build(coords, axis + 1)

        if lo == hi:
            return RangeTreeNode(lo, hi, aux)

        mid = len(coords) // 2

        node = RangeTreeNode(
            lo,
            hi,
            aux,
            self._build(coords[:mid], axis),
            self._build(coords[mid:], axis),
        )

        return node

    def _nonempty(self, node, lo, hi, axis):
        if axis == self.dim - 1:
            i = int(np.searchsorted(node, lo[axis], side="left"))
            return i < len(node) and node[i] <= hi[axis]

        if node.hi < lo[axis] or node.lo > hi[axis]:
            return False

        if lo[axis] <= node.lo and node.hi <= hi[axis]:
            return self._nonempty(node.aux, lo, hi, axis + 1)

        return self._nonempty(node.left, lo, hi, axis) or self._nonempty(
            node.right, lo, hi, axis
        )

    def is_empty(self, lo, hi):
        """
        Decide whether the box [lo, hi] holds no point.
        """

        if self.root is None:
            return True

        return not self._nonempty(self.root, lo, hi, 0)


class ColorTreeNode(object):
    def __init__(self, first, last, tree, left=None, right=None):
        self.first = first
        self.last = last
        self.tree = tree
        self.left = left
        self.right = right

    @property
    def is_leaf(self):
        return self.left is None


class ColoredReporterRD(ColoredReporter):
    """
    Capped colour reporting by emptiness queries over a colour tree.

    A balanced tree over the colours holds, at every node, a range tree
    over the points of the colours below it. Reporting descends only
    into children whose box is non-empty and stops after cap + 1 colours.

    Parameters
    ----------
    points: list of ColoredPoint
        The coloured points.
    dim: int
        The dimension, from the points if None.
    """

    def __init__(self, points, dim=None):
        self.points = list(points)

        if dim is None:
            if len(self.points) == 0:
                raise BadParamsError("The dimension of empty data must be given.")
            dim = self.points[0].dim

        if dim not in DIMENSIONS:
            raise BadParamsError("Dimension must be one of {0}: {1}".format(DIMENSIONS, dim))

        self.dim = dim
        self.colors = sorted(set(p.color for p in self.points))

        coords = {}

        for p in self.points:
            coords.setdefault(p.color, []).append(p.coords)

        self.coords = {c: np.array(v, dtype=float) for c, v in coords.items()}
        self.height = 0
        self.root = self._build(0, len(self.colors) - 1, 1)

    def _build(self, first, last, depth):
        if first > last:
            return None

        self.height = max(self.height, depth)

        members = np.vstack([self.coords[c] for c in self.colors[first : last + 1]])
        tree = RangeTree(members)

        if first == last:
            return ColorTreeNode(first, last, tree)

        mid = (first + last) // 2

        node = ColorTreeNode(
            first,
            last,
            tree,
            self._build(first, mid, depth + 1),
            self._build(mid + 1, last, depth + 1),
        )

        return node

    def _check_query(self, q):
        lo, hi = q

        if len(lo) != self.dim or len(hi) != self.dim:
            raise QueryMalformedError(
                "Query has the wrong dimension: {0} for {1}".format(q, self.dim)
            )

        if any(a > b for a, b in zip(lo, hi)):
            raise QueryMalformedError("Query is inverted: {0}".format(q))

        return np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)

    def search(self, q, cap):
        """
        Capped colour reporting together with the work it took.

        Returns
        -------
        colors: list of int
            At most cap + 1 colours present in q.
        tests: int
            The number of emptiness queries asked.
        """

        lo, hi = self._check_query(q)

        found = []
        tests = 0

        if self.root is None:
            return found, tests

        stack = [self.root]

        while len(stack) > 0 and len(found) <= cap:
            node = stack.pop()
            tests += 1

            if node.tree.is_empty(lo, hi):
                continue

            if node.is_leaf:
                found.append(self.colors[node.first])
            else:
                stack.append(node.right)
                stack.append(node.left)

        return found, tests

    def report_colors(self, q, cap):
        colors, _ = self.search(q, cap)

        return colors

    def restricted(self, objects):
        return ColoredReporterRD(objects, self.dim)

    def space_units(self):
        res = 0
        stack = [self.root] if self.root is not None else []

        while len(stack) > 0:
            node = stack.pop()
            res += node.tree.entries

            if not node.is_leaf:
                stack.extend([node.left, node.right])

        return res


def build_colored_reporter_rd(points, dim=None):
    return ColoredReporterRD(points, dim)


def build_colored_orthocount_rd(points, dim, eps, config=None, universe=None):
    """
    Approximate coloured orthogonal range counting in d dimensions.

    Capped reporting over the colour tree composed by Reduction-II.

    Raises
    ------
    SuitabilityError
        If a decision sample cannot be certified.
    """

    points = list(points)
    reporter = ColoredReporterRD(points, dim)

    if universe is None:
        universe = oracle.enumerate_queries(oracle.ORTHO_RD, points, dim=dim)

    res = build_reduction2(
        oracle.ORTHO_RD, points, reporter, eps, config=config, universe=universe
    )

    log.info("Orthogonal colour counter: n={0}, d={1}".format(len(points), dim))

    return res
