#
#   Coloured dominance in space via 5-sided box stabbing.
#

from bisect import bisect_left, bisect_right
from collections import defaultdict, namedtuple
import itertools
import logging
import math

import numpy as np

from colorcount.config import check_eps, log_n, resolve
from colorcount.dominance import DominanceIndex
from colorcount.errors import BadParamsError
from colorcount.geom_core import (
    NEG_INF,
    POS_INF,
    ApproxAnswer,
    Rect5,
    double,
    rank_space_reduce_rect5,
    snap_point,
)
from colorcount.intervaltree import LEFT, IntervalTree
import colorcount.oracle as oracle
from colorcount.sampling import bernoulli_mask, draw_until_suitable, make_rng

log = logging.getLogger(__name__)

CASE_I = "I"
CASE_II = "II"
CASE_III = "III"

COLUMN = "column"
ROW = "row"

# safety net against degenerate splits
MAX_DEPTH = 48

PhiDecomposition = namedtuple("PhiDecomposition", ["per_color", "all"])

NodeGrid = namedtuple("NodeGrid", ["region", "xs", "ys"])

AssignResult = namedtuple(
    "AssignResult",
    ["case", "grid_piece", "grid_cells", "col_pieces", "row_pieces", "passed"],
)


def _staircase_strips(stair, px, py, pz, tag):
    """
    Decompose (-inf, px] x (-inf, py] minus the staircase union into
    vertical strips.
    """

    pieces = []
    lo = NEG_INF

    for sx, sy in stair:
        hi = min(sx, px)

        if lo <= hi and sy + 1 <= py:
            pieces.append(Rect5(lo, hi, sy + 1, py, pz, tag))

        lo = sx + 1

        if lo > px:
            return pieces

    pieces.append(Rect5(lo, px, NEG_INF, py, pz, tag))

    return pieces


def _insert_staircase(stair, px, py):
    """
    Add a point to the maximal points, sorted by x ascending.
    """

    for sx, sy in stair:
        if sx >= px and sy >= py:
            return stair

    kept = [(sx, sy) for sx, sy in stair if not (sx <= px and sy <= py)]
    kept.append((px, py))
    kept.sort()

    return kept


def phi_decompose_color(points, tag=None):
    """
    Disjoint boxes whose union is the union of the regions dominated by
    the points of one colour.

    The points are processed by decreasing z. The region of a point is
    its dominated region minus the regions of the points before it,
    which is the complement of a staircase in the plane. Coordinates are
    doubled so that open boundaries become closed.

    Parameters
    ----------
    points: list of ColoredPoint
        Points of one colour in space.
    tag: object
        The tag of the pieces.

    Returns
    -------
    pieces: list of Rect5
        Boxes of the form [a, b] x [c, d] x (-inf, 2 pz].
    """

    ordered = sorted(points, key=lambda p: -p.coords[2])

    stair = []
    pieces = []

    for p in ordered:
        px, py, pz = [double(v) for v in p.coords]

        pieces.extend(_staircase_strips(stair, px, py, pz, tag))
        stair = _insert_staircase(stair, px, py)

    return pieces


def phi_decompose(points):
    """
    Transform coloured dominance in space into 5-sided box stabbing.

    A dominance query q = [qx, inf) x [qy, inf) x [qz, inf) contains a
    colour iff exactly one box of the colour contains snap_point(q).

    Parameters
    ----------
    points: list of ColoredPoint
        Coloured points in space.

    Returns
    -------
    decomposition: PhiDecomposition
        The boxes per colour and all boxes, tagged with their colour.
    """

    classes = {}

    for p in points:
        classes.setdefault(p.color, []).append(p)

    per_color = {}
    flat = []

    for color in sorted(classes):
        pieces = phi_decompose_color(classes[color], tag=color)
        per_color[color] = pieces
        flat.extend(pieces)

    decomposition = PhiDecomposition(per_color, flat)

    return decomposition


class RectStabIndex5(object):
    """
    Exact counting and capped reporting of the boxes stabbed by a point.

    An interval tree on x and one on y reduce each query to one-sided
    sub-queries, which are dominance queries in three dimensions.

    Parameters
    ----------
    rects: list of Rect5
        The boxes.
    """

    def __init__(self, rects):
        self.size = len(rects)
        self.entries = 0

        self.tree = IntervalTree(
            list(rects),
            lambda r: r.x1,
            lambda r: r.x2,
            build=self._build_y,
        )

    def _build_y(self, items, side_x):
        def build_dominance(sub, side_y):
            points = [
                (
                    r.x1 if side_x == LEFT else -r.x2,
                    r.y1 if side_y == LEFT else -r.y2,
                    -r.ztop,
                )
                for r in sub
            ]
            self.entries += len(sub)
            return DominanceIndex(points, sub)

        res = IntervalTree(items, lambda r: r.y1, lambda r: r.y2, build=build_dominance)

        return res

    def _subqueries(self, q):
        qx, qy, qz = q

        for side_x, ytree in self.tree.decompose(qx):
            for side_y, index in ytree.decompose(qy):
                point = (
                    qx if side_x == LEFT else -qx,
                    qy if side_y == LEFT else -qy,
                    -qz,
                )
                yield index, point

    def count(self, q):
        res = sum(index.count(point) for index, point in self._subqueries(q))

        return res

    def report(self, q, cap=None):
        """
        Report the stabbed boxes, at most cap + 1 of them.
        """

        res = []

        for index, point in self._subqueries(q):
            if cap is None:
                res.extend(index.report(point))
            else:
                res.extend(index.report(point, cap - len(res)))

                if len(res) > cap:
                    break

        return res

    def space_units(self):
        return self.entries


def report_stabbed_capped(rects, q, cap):
    """
    Report the boxes stabbed by q, complete if at most cap are stabbed
    and cap + 1 witnesses otherwise.
    """

    if cap < 0:
        raise BadParamsError("The cap must be non-negative: {0}".format(cap))

    index = RectStabIndex5(rects)

    res = index.report(q, cap)

    return res


def _splits(lower, upper, lo, hi, num):
    """
    Quantile split values of one axis. A split v separates v from v + 1.
    """

    candidates = [v - 1 for v in lower if not math.isinf(v)] + [
        v for v in upper if not math.isinf(v)
    ]
    candidates = np.sort(
        np.array([v for v in candidates if lo <= v < hi], dtype=float)
    )

    if len(candidates) == 0:
        return []

    picks = set()

    for i in range(1, num):
        picks.add(candidates[(i * len(candidates)) // num])

    res = sorted(int(v) for v in picks)

    return res


def node_grid(pieces, region, eps):
    """
    The g x g grid of a recursion-tree node.

    With m pieces, t = max(2, ceil(log_{1 + eps} m)) and
    g = max(2, ceil(2 sqrt(m / t))). The last slab may be short.
    """

    m = max(len(pieces), 2)
    t = max(2, int(math.ceil(math.log(m) / math.log(1.0 + eps))))
    g = max(2, int(math.ceil(2.0 * math.sqrt(m / float(t)))))

    xlo, xhi, ylo, yhi = region

    xs = _splits([p.x1 for p in pieces], [p.x2 for p in pieces], xlo, xhi, g)
    ys = _splits([p.y1 for p in pieces], [p.y2 for p in pieces], ylo, yhi, g)

    grid = NodeGrid(region, xs, ys)

    return grid


def _slab_bounds(splits, lo, hi, index):
    left = splits[index - 1] + 1 if index > 0 else lo
    right = splits[index] if index < len(splits) else hi

    return left, right


def assign_case(piece, grid):
    """
    Assign a box to a recursion-tree node.

    Case I: the xy-projection lies in one column (or else one row) and
    the box is passed down. Otherwise the box is cut into a grid piece
    covering whole cells, at most two column pieces and at most two row
    pieces. Case II has no side on the node boundary, Case III at least
    one. Column pieces with a y-side on the boundary, and row pieces
    with an x-side on the boundary, stay in the slab structures of the
    node. The others are passed to the child of their slab.

    Parameters
    ----------
    piece: Rect5
        A box intersecting the node region.
    grid: NodeGrid
        The node region and split values.

    Returns
    -------
    result: AssignResult
        The case and the pieces. col_pieces and row_pieces hold
        (slab index, piece) pairs, passed holds (COLUMN or ROW, slab
        index, piece) triples.
    """

    xlo, xhi, ylo, yhi = grid.region
    xs, ys = grid.xs, grid.ys

    a, b, c, d = piece.x1, piece.x2, piece.y1, piece.y2
    z, tag = piece.ztop, piece.tag

    cl, cr = bisect_left(xs, a), bisect_left(xs, b)
    rl, rr = bisect_left(ys, c), bisect_left(ys, d)

    if len(xs) > 0 and cl == cr:
        return AssignResult(CASE_I, None, None, [], [], [(COLUMN, cl, piece)])

    if len(ys) > 0 and rl == rr:
        return AssignResult(CASE_I, None, None, [], [], [(ROW, rl, piece)])

    a_open = a <= xlo
    b_open = b >= xhi
    c_open = c <= ylo
    d_open = d >= yhi

    ox = int(a_open) + int(b_open)
    oy = int(c_open) + int(d_open)

    case = CASE_II if ox + oy == 0 else CASE_III

    col_pieces = []
    row_pieces = []
    passed = []

    def place(kind, index, part, keep):
        if keep:
            (col_pieces if kind == COLUMN else row_pieces).append((index, part))
        else:
            passed.append((kind, index, part))

    if not a_open:
        place(COLUMN, cl, Rect5(a, xs[cl], c, d, z, tag), oy >= 1)

    if not b_open:
        place(COLUMN, cr, Rect5(xs[cr - 1] + 1, b, c, d, z, tag), oy >= 1)

    fx0 = cl if a_open else cl + 1
    fx1 = cr if b_open else cr - 1

    grid_piece = None
    grid_cells = None

    if fx0 <= fx1:
        left = a if a_open else xs[cl] + 1
        right = b if b_open else xs[cr - 1]

        if not c_open:
            place(ROW, rl, Rect5(left, right, c, ys[rl], z, tag), ox >= 1)

        if not d_open:
            place(ROW, rr, Rect5(left, right, ys[rr - 1] + 1, d, z, tag), ox >= 1)

        fy0 = rl if c_open else rl + 1
        fy1 = rr if d_open else rr - 1

        if fy0 <= fy1:
            bottom = c if c_open else ys[rl] + 1
            top = d if d_open else ys[rr - 1]
            grid_piece = Rect5(left, right, bottom, top, z, tag)
            grid_cells = (fx0, fx1, fy0, fy1)

    result = AssignResult(case, grid_piece, grid_cells, col_pieces, row_pieces, passed)

    return result


SIDES = ["x1", "x2", "y1", "y2"]


def _bounded_sides(piece, region):
    xlo, xhi, ylo, yhi = region
    flags = [piece.x1 > xlo, piece.x2 < xhi, piece.y1 > ylo, piece.y2 < yhi]

    return tuple(side for side, flag in zip(SIDES, flags) if flag)


def _constraint(values, sides):
    x1, x2, y1, y2, z = values
    lookup = {"x1": x1, "x2": -x2, "y1": y1, "y2": -y2}

    return tuple(lookup[side] for side in sides) + (-z,)


class SlabIndex(object):
    """
    Exact counting of the boxes of one slab.

    Sides on or beyond the slab boundary impose nothing on queries inside
    the slab, so the boxes are grouped by their bounded sides and every
    group is a dominance index.
    """

    def __init__(self, pieces, region):
        groups = defaultdict(list)

        for p in pieces:
            groups[_bounded_sides(p, region)].append(p)

        self.size = len(pieces)
        self.groups = []

        for sides, members in groups.items():
            points = [
                _constraint((p.x1, p.x2, p.y1, p.y2, p.ztop), sides) for p in members
            ]
            self.groups.append((sides, DominanceIndex(points, members)))

    def count(self, q):
        qx, qy, qz = q
        res = 0

        for sides, index in self.groups:
            res += index.count(_constraint((qx, qx, qy, qy, qz), sides))

        return res


def sketch_ranks(total, eps):
    """
    The ranks 1, r(1 + eps), .. kept by a sketch, and the total.
    """

    ranks = []
    r = 1

    while r < total:
        ranks.append(r)
        r = max(r + 1, int(math.floor(r * (1.0 + eps))))

    if total >= 1:
        ranks.append(total)

    return ranks


class Sketch(object):
    """
    The z-tops of the grid pieces covering a cell, kept at geometric ranks.

    The estimate is the largest kept rank whose z-top is at least the
    query z, which lies within a factor 1 + eps below the exact count.
    """

    def __init__(self, ztops, eps):
        ztops = np.sort(np.asarray(ztops, dtype=float))[::-1]

        self.ranks = sketch_ranks(len(ztops), eps)
        self.neg_z = [-ztops[r - 1] for r in self.ranks]

    def __len__(self):
        return len(self.ranks)

    def estimate(self, qz):
        # fusion-tree predecessor replaced by binary search
        index = bisect_right(self.neg_z, -qz)

        if index == 0:
            return 0

        return self.ranks[index - 1]


class RecursionNode(object):
    def __init__(self, node_id, depth, region):
        self.node_id = node_id
        self.depth = depth
        self.region = region
        self.grid = None
        self.leaf = None
        self.sketches = {}
        self.grid_pieces = []
        self.col_structs = {}
        self.row_structs = {}
        self.col_children = {}
        self.row_children = {}

    @property
    def is_leaf(self):
        return self.leaf is not None


class RecursionTree(object):
    """
    (1 + eps)-approximate counting of the boxes stabbed by a point.

    Every node lays a grid over its pieces. Pieces covering whole grid
    cells go to per-cell sketches, 3-sided pieces of a single slab go to
    exact slab structures and the rest is passed down to one child per
    row and column. A query sums the answers along its paths. Coordinates
    are integers.

    Parameters
    ----------
    rects: list of Rect5
        The boxes.
    eps: float
        The approximation parameter in (0, 1].
    config: Config or None
        The constants.
    """

    def __init__(self, rects, eps, config=None):
        check_eps(eps)

        self.eps = eps
        self.config = resolve(config)
        self.rects = list(rects)
        self.num_nodes = 0
        self.assignments = defaultdict(lambda: defaultdict(set))

        pieces = [
            Rect5(r.x1, r.x2, r.y1, r.y2, r.ztop, tag=i) for i, r in enumerate(self.rects)
        ]
        region = (NEG_INF, POS_INF, NEG_INF, POS_INF)

        self.root = self._build(pieces, region, 0)

    def _record(self, node, pieces):
        for p in pieces:
            self.assignments[p.tag][node.depth].add(node.node_id)

    def _make_leaf(self, node, pieces):
        node.leaf = np.array(
            [[p.x1, p.x2, p.y1, p.y2, p.ztop] for p in pieces], dtype=float
        ).reshape(-1, 5)
        self._record(node, pieces)

        return node

    def _build(self, pieces, region, depth):
        node = RecursionNode(self.num_nodes, depth, region)
        self.num_nodes += 1

        if len(pieces) < self.config.leaf_size or depth >= MAX_DEPTH:
            return self._make_leaf(node, pieces)

        grid = node_grid(pieces, region, self.eps)

        if len(grid.xs) == 0 and len(grid.ys) == 0:
            return self._make_leaf(node, pieces)

        node.grid = grid

        col_pieces = defaultdict(list)
        row_pieces = defaultdict(list)
        passed = {COLUMN: defaultdict(list), ROW: defaultdict(list)}

        for piece in pieces:
            result = assign_case(piece, grid)

            if result.grid_piece is not None:
                node.grid_pieces.append((result.grid_piece, result.grid_cells))

            for index, part in result.col_pieces:
                col_pieces[index].append(part)

            for index, part in result.row_pieces:
                row_pieces[index].append(part)

            for kind, index, part in result.passed:
                passed[kind][index].append(part)

        self._record(node, [p for p, _ in node.grid_pieces])
        self._build_sketches(node)

        xlo, xhi, ylo, yhi = region

        for index, members in col_pieces.items():
            left, right = _slab_bounds(grid.xs, xlo, xhi, index)
            node.col_structs[index] = SlabIndex(members, (left, right, ylo, yhi))
            self._record(node, members)

        for index, members in row_pieces.items():
            bottom, top = _slab_bounds(grid.ys, ylo, yhi, index)
            node.row_structs[index] = SlabIndex(members, (xlo, xhi, bottom, top))
            self._record(node, members)

        for index, members in passed[COLUMN].items():
            left, right = _slab_bounds(grid.xs, xlo, xhi, index)
            node.col_children[index] = self._build(
                members, (left, right, ylo, yhi), depth + 1
            )

        for index, members in passed[ROW].items():
            bottom, top = _slab_bounds(grid.ys, ylo, yhi, index)
            node.row_children[index] = self._build(
                members, (xlo, xhi, bottom, top), depth + 1
            )

        return node

    def _build_sketches(self, node):
        if len(node.grid_pieces) == 0:
            return

        ncols = len(node.grid.xs) + 1
        nrows = len(node.grid.ys) + 1

        cover = np.zeros((len(node.grid_pieces), ncols, nrows), dtype=bool)
        ztops = np.zeros(len(node.grid_pieces))

        for i, (piece, (fx0, fx1, fy0, fy1)) in enumerate(node.grid_pieces):
            cover[i, fx0 : fx1 + 1, fy0 : fy1 + 1] = True
            ztops[i] = piece.ztop

        for col, row in itertools.product(range(ncols), range(nrows)):
            mask = cover[:, col, row]

            if np.any(mask):
                node.sketches[(col, row)] = Sketch(ztops[mask], self.eps)

    def _query(self, node, q):
        qx, qy, qz = q

        if node.is_leaf:
            boxes = node.leaf
            mask = (
                (boxes[:, 0] <= qx)
                & (qx <= boxes[:, 1])
                & (boxes[:, 2] <= qy)
                & (qy <= boxes[:, 3])
                & (qz <= boxes[:, 4])
            )
            return int(np.count_nonzero(mask))

        col = bisect_left(node.grid.xs, qx)
        row = bisect_left(node.grid.ys, qy)

        total = 0

        sketch = node.sketches.get((col, row))
        if sketch is not None:
            total += sketch.estimate(qz)

        if col in node.col_structs:
            total += node.col_structs[col].count(q)

        if row in node.row_structs:
            total += node.row_structs[row].count(q)

        if col in node.col_children:
            total += self._query(node.col_children[col], q)

        if row in node.row_children:
            total += self._query(node.row_children[row], q)

        return total

    def query(self, q):
        """
        Approximate the number of boxes containing the point q.

        Returns
        -------
        answer: ApproxAnswer
            EPSAPPROX(eps), never above the exact count.
        """

        res = ApproxAnswer.epsapprox(self._query(self.root, q), self.eps)

        return res

    def max_assignments_per_level(self):
        """
        The largest number of nodes of one level holding pieces of one box.
        """

        res = 0

        for levels in self.assignments.values():
            for nodes in levels.values():
                res = max(res, len(nodes))

        return res

    def iter_nodes(self):
        stack = [self.root]

        while len(stack) > 0:
            node = stack.pop()
            yield node
            stack.extend(node.col_children.values())
            stack.extend(node.row_children.values())

    def space_units(self):
        res = 0

        for node in self.iter_nodes():
            if node.is_leaf:
                res += len(node.leaf)
                continue

            res += len(node.grid.xs) + len(node.grid.ys)
            res += sum(len(s) for s in node.sketches.values())
            res += sum(s.size for s in node.col_structs.values())
            res += sum(s.size for s in node.row_structs.values())

        return res


def build_recursion_tree(rects, eps, config=None):
    tree = RecursionTree(rects, eps, config)

    log.debug(
        "Recursion tree: n={0}, nodes={1}, space={2}".format(
            len(rects), tree.num_nodes, tree.space_units()
        )
    )

    return tree


def query_recursion_tree(tree, q):
    return tree.query(q)


def sampling_delta(n, config):
    """
    The inverse sampling rate ceil(log2 log2 n), at least 2.
    """

    if config.delta is not None:
        return int(config.delta)

    res = max(2, int(math.ceil(math.log2(math.log2(max(n, 4))))))

    return res


class SampledStabber(object):
    """
    (1 + eps)-approximate 5-sided box stabbing with a sampled recursion
    tree.

    Counts up to K = C eps'^-2 ln(n) delta are found exactly by capped
    reporting. Larger counts are delta times the answer of a recursion
    tree with eps' = eps / 4 over a verified sample of rate 1 / delta.

    Parameters
    ----------
    rects: list of Rect5
        The boxes, with integer coordinates.
    eps: float
        The approximation parameter in (0, 1].
    config: Config or None
        The constants.
    """

    def __init__(self, rects, eps, config=None):
        check_eps(eps)

        self.eps = eps
        self.config = resolve(config)
        self.rects = list(rects)
        self.n = len(self.rects)
        self.delta = sampling_delta(self.n, self.config)
        self.eps_sample = eps / 4.0
        self.threshold = (
            self.config.sampler_c
            * self.eps_sample ** (-2)
            * log_n(self.n)
            * self.delta
        )
        self.cap = int(math.floor(self.threshold))
        self.attempts = 0

        self.full = RectStabIndex5(self.rects)
        self.indices = self._draw_sample()
        self.sample = [self.rects[i] for i in self.indices]
        self.tree = build_recursion_tree(self.sample, self.eps_sample, self.config)

        log.info(
            "Sampled stabber: n={0}, delta={1}, K={2:.1f}, sample={3}".format(
                self.n, self.delta, self.threshold, len(self.sample)
            )
        )

    def _draw_sample(self):
        if self.delta <= 1 or self.n == 0:
            return np.arange(self.n)

        prob = 1.0 / self.delta
        limit = 2.0 * self.n / self.delta + 1

        def draw(seed):
            rng = make_rng(seed)
            return np.flatnonzero(bernoulli_mask(self.n, prob, rng))

        if self.threshold >= self.n:
            # no count exceeds the threshold, only the size matters
            indices, self.attempts = draw_until_suitable(
                draw,
                lambda indices: len(indices) <= limit,
                self.config.seed,
                self.config.attempt_cap,
                "stab3d",
            )
            return indices

        reduced, _ = rank_space_reduce_rect5(self.rects)
        shape = (2 * self.n, 2 * self.n, self.n)

        # counts only grow as cz decreases, so the heavy levels are a prefix
        heavy = set()

        for cz, k in oracle.iter_slices_rect5(reduced, shape):
            if k.max() > self.threshold:
                heavy = set(range(cz + 1))
                break

        log.debug("Sampled stabber: {0} heavy z levels".format(len(heavy)))

        def is_suitable(indices):
            if len(indices) > limit:
                return False

            if len(heavy) == 0:
                return True

            sample = [reduced[i] for i in indices]
            slices = zip(
                oracle.iter_slices_rect5(reduced, shape, heavy),
                oracle.iter_slices_rect5(sample, shape, heavy),
            )

            for (_, k), (_, s) in slices:
                mask = k > self.threshold
                k_sel = k[mask]
                error = np.abs(k_sel - self.delta * s[mask])

                if not np.all(error <= self.eps_sample * k_sel + 1.0e-9):
                    return False

            return True

        indices, self.attempts = draw_until_suitable(
            draw, is_suitable, self.config.seed, self.config.attempt_cap, "stab3d"
        )

        return indices

    def query(self, q):
        witnesses = self.full.report(q, self.cap)

        if len(witnesses) <= self.cap:
            return ApproxAnswer.exact(len(witnesses))

        value = self.delta * self.tree.query(q).value

        return ApproxAnswer.epsapprox(value, self.eps)

    def space_units(self):
        res = self.full.space_units() + len(self.sample) + self.tree.space_units()

        return res


def build_sampled_stabber(rects, eps, seed=None, config=None):
    """
    Build the sampled stabber.

    Raises
    ------
    SuitabilityError
        If no sample passes verification within the attempt cap.
    """

    config = resolve(config)

    if seed is not None:
        config = config.copy(seed=seed)

    stabber = SampledStabber(rects, eps, config)

    return stabber


def double_rect5(rect):
    res = Rect5(
        double(rect.x1),
        double(rect.x2),
        double(rect.y1),
        double(rect.y2),
        double(rect.ztop),
        rect.tag,
    )

    return res


class BoxStabCounter(object):
    """
    (1 + eps)-approximate counting of the integer boxes stabbed by a real
    point.

    The boxes are doubled and the queries snapped, so the recursion tree
    only ever sees integer coordinates.

    Parameters
    ----------
    rects: list of Rect5
        Boxes with integer coordinates.
    eps: float
        The approximation parameter in (0, 1].
    config: Config or None
        The constants.
    sampled: bool
        Use the sampled stabber, the plain recursion tree otherwise.
    """

    def __init__(self, rects, eps, config=None, sampled=True):
        doubled = [double_rect5(r) for r in rects]

        if sampled:
            self.structure = build_sampled_stabber(doubled, eps, config=config)
        else:
            self.structure = build_recursion_tree(doubled, eps, config)

    def query(self, q):
        res = self.structure.query(snap_point(q))

        return res

    def space_units(self):
        return self.structure.space_units()


def build_box_stab_counter(rects, eps, config=None, sampled=True):
    return BoxStabCounter(rects, eps, config, sampled)


class ColoredDominanceCounter(object):
    """
    (1 + eps)-approximate coloured dominance counting in space.
    """

    def __init__(self, points, eps, config=None):
        self.decomposition = phi_decompose(points)
        self.stabber = build_sampled_stabber(self.decomposition.all, eps, config=config)

    def query(self, q):
        res = self.stabber.query(snap_point(q))

        return res

    def space_units(self):
        return self.stabber.space_units()


def build_colored_dominance_counter(points, eps, config=None):
    """
    Compose the box decomposition and the sampled stabber.
    """

    res = ColoredDominanceCounter(points, eps, config)

    return res
