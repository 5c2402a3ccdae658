#
#   Interval tree on one axis with left and right halves per node.
#

import math

import numpy as np

LEFT = "left"
RIGHT = "right"


class IntervalTreeNode(object):
    def __init__(self, split, items, left_struct, right_struct, lower, upper):
        self.split = split
        self.items = items
        self.left_struct = left_struct
        self.right_struct = right_struct
        self.lower = lower
        self.upper = upper


class IntervalTree(object):
    """
    Interval tree over items with a lower and an upper key on one axis.

    Every item is stored at the highest node whose split value it contains.
    A query value v that is at most the split only needs the lower keys
    of the items there (the left halves), a value above the split only
    needs the upper keys (the right halves). This turns a query on items
    bounded on both sides of the axis into one query per node on the path
    over items bounded on one side.

    Parameters
    ----------
    items: list
        The items.
    lo_key: func
        Returns the lower key of an item.
    hi_key: func
        Returns the upper key of an item.
    build: func
        Called as build(items, side) with side LEFT or RIGHT, returns the
        secondary structure of a node. The default keeps the item list.
    """

    def __init__(self, items, lo_key, hi_key, build=None):
        self.lo_key = lo_key
        self.hi_key = hi_key
        self.build = build if build is not None else (lambda items, side: items)
        self.size = len(items)
        self.num_nodes = 0
        self.root = self._build(list(items))

    def _build(self, items):
        if len(items) == 0:
            return None

        endpoints = [self.lo_key(item) for item in items] + [
            self.hi_key(item) for item in items
        ]
        finite = np.array([v for v in endpoints if not math.isinf(v)], dtype=float)

        if len(finite) == 0:
            split = 0
        else:
            # an actual endpoint, so at least one item stays here
            split = np.sort(finite)[(len(finite) - 1) // 2]

        here = []
        below = []
        above = []

        for item in items:
            if self.hi_key(item) < split:
                below.append(item)
            elif self.lo_key(item) > split:
                above.append(item)
            else:
                here.append(item)

        self.num_nodes += 1

        node = IntervalTreeNode(
            split,
            here,
            self.build(here, LEFT),
            self.build(here, RIGHT),
            self._build(below),
            self._build(above),
        )

        return node

    def decompose(self, value):
        """
        Break a stabbing query into one-sided sub-queries.

        Parameters
        ----------
        value: float
            The query coordinate on the tree axis.

        Returns
        -------
        subqueries: list of (str, object)
            Per node on the search path, the side to query and the
            secondary structure. On side LEFT an item matches iff its lower
            key is at most value, on side RIGHT iff its upper key is at
            least value. The item sets of the sub-queries are disjoint.
        """

        subqueries = []
        node = self.root

        while node is not None:
            if value <= node.split:
                subqueries.append((LEFT, node.left_struct))
                node = node.lower if value < node.split else None
            else:
                subqueries.append((RIGHT, node.right_struct))
                node = node.upper

        return subqueries

    def depth(self):
        def _depth(node):
            if node is None:
                return 0
            return 1 + max(_depth(node.lower), _depth(node.upper))

        return _depth(self.root)
