#
#   Coloured stabbing in the plane via nested shallow cuttings.
#

from bisect import bisect_left
from collections import namedtuple
import heapq
import logging
import math

import numpy as np

from colorcount.config import check_eps, resolve, sampling_scale
from colorcount.errors import (
    BadParamsError,
    QueryOutOfGridError,
    SettingUnsupportedError,
)
from colorcount.geom_core import (
    NEG_INF,
    ApproxAnswer,
    ColoredRect3S,
    StabRect3S,
    double,
    rank_space_reduce,
    snap_query,
)
import colorcount.oracle as oracle
from colorcount.sampling import bernoulli_mask, draw_until_suitable, make_rng

log = logging.getLogger(__name__)

# outcomes of the level structures
TABLE_HIT = "table_hit"
AT_LEAST = "at_least"
BELOW_BASE = "below_base"
BRACKET = "bracket"
ABOVE_TOP = "above_top"

EMBEDDABLE = [oracle.INTERVAL_STAB_1D, oracle.DOM2D, oracle.STAB3S_2D]

Cell = namedtuple("Cell", ["x1", "x2", "ytop"])

LevelResult = namedtuple("LevelResult", ["status", "answer", "index"])

UnionDecomposition = namedtuple("UnionDecomposition", ["per_color", "all"])


def union_decompose_color(rects):
    """
    Vertical decomposition of the union of 3-sided rectangles.

    The union is the region above the lower envelope h(x), the smallest y
    of the rectangles covering x. Maximal x-ranges of constant h become
    one piece each.

    Parameters
    ----------
    rects: list of StabRect3S or ColoredRect3S
        Rectangles of one colour with integer x-sides.

    Returns
    -------
    pieces: list of StabRect3S
        Pairwise disjoint pieces whose union equals the input union.
    """

    if len(rects) == 0:
        return []

    events = sorted(set([r.x1 for r in rects] + [r.x2 + 1 for r in rects]))
    by_start = sorted(rects, key=lambda r: r.x1)

    heap = []
    spans = []
    i = 0

    for a, b in zip(events[:-1], events[1:]):
        while i < len(by_start) and by_start[i].x1 <= a:
            heapq.heappush(heap, (by_start[i].y, by_start[i].x2))
            i += 1

        while len(heap) > 0 and heap[0][1] < a:
            heapq.heappop(heap)

        if len(heap) == 0:
            continue

        h = heap[0][0]

        if len(spans) > 0 and spans[-1][1] == a - 1 and spans[-1][2] == h:
            spans[-1][1] = b - 1
        else:
            spans.append([a, b - 1, h])

    pieces = [StabRect3S(lo, hi, h) for lo, hi, h in spans]

    return pieces


def union_decompose(rects):
    """
    Union decomposition of every colour class.

    Parameters
    ----------
    rects: list of ColoredRect3S
        The coloured rectangles.

    Returns
    -------
    decomposition: UnionDecomposition
        The pieces per colour and all pieces, tagged with their colour.
    """

    classes = {}

    for r in rects:
        classes.setdefault(r.color, []).append(r)

    per_color = {}
    flat = []

    for color in sorted(classes):
        pieces = [
            StabRect3S(p.x1, p.x2, p.y, tag=color)
            for p in union_decompose_color(classes[color])
        ]
        per_color[color] = pieces
        flat.extend(pieces)

    decomposition = UnionDecomposition(per_color, flat)

    return decomposition


def embed_setting(setting, objects, doubled=False):
    """
    Express a planar coloured setting as coloured 3-sided stabbing.

    An interval [a, b] becomes [a, b] x [0, inf) with query x mapped to
    (x, 0). A point (px, py) with quadrant query [qx, inf) x [qy, inf)
    becomes (-inf, px] x [-py, inf) with query (qx, -qy).

    Parameters
    ----------
    setting: str
        INTERVAL_STAB_1D, DOM2D or STAB3S_2D.
    objects: list
        The coloured objects.
    doubled: bool
        Work in doubled-integer space and snap real query coordinates, so
        that pieces of set differences stay closed.

    Returns
    -------
    rects: list of ColoredRect3S
        The embedded rectangles.
    adapter: func
        Maps a raw query of the setting to a stabbing point.

    Raises
    ------
    SettingUnsupportedError
        For every other setting.
    """

    scale = double if doubled else (lambda v: v)
    snap = snap_query if doubled else (lambda v: v)

    if setting == oracle.INTERVAL_STAB_1D:
        rects = [
            ColoredRect3S(scale(o.lo), scale(o.hi), 0, o.color) for o in objects
        ]

        def adapter(q):
            if isinstance(q, (tuple, list)):
                q = q[0]
            return (snap(q), 0)

    elif setting == oracle.DOM2D:
        rects = [
            ColoredRect3S(NEG_INF, scale(o.coords[0]), -scale(o.coords[1]), o.color)
            for o in objects
        ]

        def adapter(q):
            return (snap(q[0]), -snap(q[1]))

    elif setting == oracle.STAB3S_2D:
        rects = [
            ColoredRect3S(scale(o.x1), scale(o.x2), scale(o.y), o.color)
            for o in objects
        ]

        def adapter(q):
            return (snap(q[0]), snap(q[1]))

    else:
        raise SettingUnsupportedError(
            "Setting cannot be embedded in the plane: {0}".format(setting)
        )

    return rects, adapter


class ShallowCutting(object):
    """
    A shallow cutting of rank-space reduced 3-sided rectangles.

    The x positions 1 .. width are split into slabs of `level` positions.
    The cell of a slab is the slab times (-inf, ytop]. A rectangle of
    y-rank r contains the positions cy > r.
    """

    def __init__(self, level, width, cells, conflict_lists):
        self.level = level
        self.width = width
        self.cells = cells
        self.conflict_lists = conflict_lists
        self.ytops = np.array([cell.ytop for cell in cells], dtype=float)

    def __len__(self):
        return len(self.cells)

    def slab_of(self, cx):
        if cx < 1 or cx > self.width:
            return None

        return (cx - 1) // self.level

    def locate(self, cx, cy):
        """
        The index of the cell containing the position, None if outside.
        """

        slab = self.slab_of(cx)

        if slab is None or cy > self.cells[slab].ytop:
            return None

        return slab

    def space_units(self):
        res = len(self.cells)

        if self.conflict_lists is not None:
            res += sum(len(c) for c in self.conflict_lists)

        return res


def build_shallow_cutting(rects, level, width=None, keep_conflicts=True):
    """
    Build the shallow cutting of one level.

    Parameters
    ----------
    rects: list of StabRect3S
        Rank-space reduced rectangles.
    level: int
        The level t >= 1.
    width: int or None
        The largest x position, 2n by default.
    keep_conflicts: bool
        Store the conflict lists.

    Returns
    -------
    cutting: ShallowCutting
        At most ceil(width / t) cells. A position outside every cell is
        contained in at least t rectangles and every conflict list holds
        at most 2t rectangles.
    """

    if level < 1:
        raise BadParamsError("The level must be positive: {0}".format(level))

    if width is None:
        width = 2 * len(rects)

    x1 = np.array([r.x1 for r in rects], dtype=int)
    x2 = np.array([r.x2 for r in rects], dtype=int)
    y = np.array([r.y for r in rects], dtype=int)

    num_slabs = int(math.ceil(width / float(level))) if width > 0 else 0

    cells = []
    conflict_lists = [] if keep_conflicts else None

    for i in range(num_slabs):
        xlo = i * level + 1
        xhi = min((i + 1) * level, width)

        ys = y[(x1 < xlo) & (x2 >= xhi)]

        if len(ys) >= level:
            ytop = int(np.partition(ys, level - 1)[level - 1])
        else:
            ytop = math.inf

        cells.append(Cell(xlo, xhi, ytop))

        if keep_conflicts:
            conflicts = np.flatnonzero((x1 < xhi) & (x2 >= xlo) & (y < ytop))
            conflict_lists.append(conflicts.tolist())

    cutting = ShallowCutting(level, width, cells, conflict_lists)

    return cutting


def _check_position(cx, cy, width, height):
    for value, top, axis in [(cx, width, "x"), (cy, height, "y")]:
        if int(value) != value or not (0 <= value <= top):
            raise QueryOutOfGridError(
                "The {0} position {1} is outside [0, {2}]".format(axis, value, top)
            )


class LevelLadder(object):
    """
    Nested shallow cuttings at the levels t, 2t, .., t'.

    Per base cell r, C_r lists the ytop values of the cells containing r
    at the levels 2t .. t'.
    """

    def __init__(self, cuttings, height):
        self.cuttings = cuttings
        self.base = cuttings[0].level
        self.top = cuttings[-1].level
        self.width = cuttings[0].width
        self.height = height

        self.cr = []

        for r in range(len(cuttings[0])):
            self.cr.append([c.cells[r >> j].ytop for j, c in enumerate(cuttings) if j > 0])

    def space_units(self):
        res = len(self.cuttings[0]) + sum(len(c) for c in self.cr)

        return res


def build_level_ladder(rects, t, t_top, width=None, height=None):
    """
    Build the (t, t')-level structure.

    Parameters
    ----------
    rects: list of StabRect3S
        Rank-space reduced rectangles.
    t: int
        The base level.
    t_top: int
        The top level, t times a power of two.

    Returns
    -------
    ladder: LevelLadder
        The nested cuttings.
    """

    if t < 1 or t_top < t:
        raise BadParamsError("Invalid levels: {0}, {1}".format(t, t_top))

    steps = int(round(math.log2(t_top / float(t))))

    if t * 2**steps != t_top:
        raise BadParamsError(
            "The top level {0} is not {1} times a power of two".format(t_top, t)
        )

    if height is None:
        height = len(rects)

    cuttings = [
        build_shallow_cutting(rects, t * 2**j, width=width, keep_conflicts=False)
        for j in range(steps + 1)
    ]

    ladder = LevelLadder(cuttings, height)

    return ladder


def query_level_ladder(ladder, cx, cy):
    """
    Bracket the stab count of a position with a level ladder.

    Returns
    -------
    result: LevelResult
        BELOW_BASE if the position lies in its base cell (k <= 2t),
        ABOVE_TOP if it lies outside every cell (k >= t'), otherwise
        BRACKET with a CAPPROX(4) answer z = 2^j t, so k lies in [z, 4z].

    Raises
    ------
    QueryOutOfGridError
        If the position is outside the grid.
    """

    _check_position(cx, cy, ladder.width, ladder.height)

    if len(ladder.cuttings[0]) == 0 or cx == 0:
        return LevelResult(BELOW_BASE, None, None)

    base = ladder.cuttings[0]
    r = base.slab_of(cx)

    if cy <= base.cells[r].ytop:
        return LevelResult(BELOW_BASE, None, None)

    # fusion-tree predecessor replaced by binary search
    j = bisect_left(ladder.cr[r], cy)

    if j == len(ladder.cr[r]):
        return LevelResult(ABOVE_TOP, None, len(ladder.cuttings) - 1)

    z = ladder.base * 2**j

    return LevelResult(BRACKET, ApproxAnswer.capprox(z, 4), j)


def canonicalize_conflict_list(rects):
    """
    The label of a conflict list: "x1 x2" per rank-reduced rectangle in
    ascending y.

    Equal sets give equal labels regardless of input order.
    """

    ordered = sorted(rects, key=lambda r: (r.y, r.x1, r.x2))
    reduced, _, _ = rank_space_reduce(ordered)
    reduced.sort(key=lambda r: r.y)

    label = " ".join("{0} {1}".format(r.x1, r.x2) for r in reduced)

    return label


class TableCell(object):
    def __init__(self, label, xs, ys):
        self.label = label
        self.xs = xs
        self.ys = ys

    def local(self, cx, cy):
        return bisect_left(self.xs, cx), bisect_left(self.ys, cy)


class SharedTable(object):
    """
    Exact counts below the level L, shared between cells whose conflict
    lists are equal after rank-space reduction.
    """

    def __init__(self, rects, cutting, height, use_table):
        self.rects = rects
        self.cutting = cutting
        self.level = cutting.level
        self.height = height
        self.use_table = use_table
        self.cells = []
        self.lookup = {}

        if use_table:
            self._fill()

    def _fill(self):
        grids = {}

        for index, cell in enumerate(self.cutting.cells):
            conflicts = [self.rects[i] for i in self.cutting.conflict_lists[index]]
            label = canonicalize_conflict_list(conflicts)

            xs = sorted([r.x1 for r in conflicts] + [r.x2 for r in conflicts])
            ys = sorted(r.y for r in conflicts)
            entry = TableCell(label, xs, ys)
            self.cells.append(entry)

            if label not in grids:
                ordered = sorted(conflicts, key=lambda r: (r.y, r.x1, r.x2))
                local, _, _ = rank_space_reduce(ordered)
                grids[label] = oracle.grid_counts_3s(local, 2 * len(local), len(local))

            counts = grids[label]

            # only the local positions reachable from inside the cell
            ax, ay = entry.local(cell.x1, 1)
            bx, by = entry.local(cell.x2, min(cell.ytop, self.height))

            for lx in range(ax, bx + 1):
                for ly in range(ay, by + 1):
                    self.lookup.setdefault((label, lx, ly), int(counts[lx, ly]))

    def query(self, cx, cy):
        """
        Exact count inside the cutting, AT_LEAST(L) outside.
        """

        index = self.cutting.locate(cx, cy)

        if index is None:
            return LevelResult(AT_LEAST, None, None)

        if not self.use_table:
            k = sum(
                1
                for i in self.cutting.conflict_lists[index]
                if self.rects[i].x1 < cx <= self.rects[i].x2 and self.rects[i].y < cy
            )
            return LevelResult(TABLE_HIT, ApproxAnswer.exact(k), None)

        entry = self.cells[index]
        lx, ly = entry.local(cx, cy)
        k = self.lookup[(entry.label, lx, ly)]

        return LevelResult(TABLE_HIT, ApproxAnswer.exact(k), None)

    def num_labels(self):
        return len(set(entry.label for entry in self.cells))

    def space_units(self):
        res = self.cutting.space_units() + len(self.lookup)

        return res


def table_level(n):
    """
    The level L = ceil(sqrt(log2 n)) of the shared table, at least 1.
    """

    res = max(1, int(math.ceil(math.sqrt(math.log2(max(n, 2))))))

    return res


def build_shared_table(rects, config=None):
    """
    Build the shared table of rank-space reduced rectangles.
    """

    config = resolve(config)
    n = len(rects)

    cutting = build_shallow_cutting(rects, table_level(n))
    table = SharedTable(rects, cutting, n, n >= config.shared_table_min_n)

    return table


def query_shared_table(table, cx, cy):
    _check_position(cx, cy, table.cutting.width, table.height)

    if cx == 0 or cy == 0:
        return LevelResult(TABLE_HIT, ApproxAnswer.exact(0), None)

    res = table.query(cx, cy)

    return res


def _closed(rects):
    """
    Position-space rectangles in closed raw form, so that a position
    (cx, cy) is a raw query point.
    """

    return [StabRect3S(r.x1 + 1, r.x2, r.y + 1) for r in rects]


class CutCounter(object):
    """
    Exact counting below a level by scanning the conflict list of the
    cell that holds the query.
    """

    def __init__(self, rects, level):
        self.size = len(rects)
        self.reduced, self.x_map, self.y_map = rank_space_reduce(rects)
        self.cutting = build_shallow_cutting(self.reduced, level)
        self.fallbacks = 0

    def count(self, q):
        cx = self.x_map.position(q[0])
        cy = self.y_map.position(q[1])

        index = self.cutting.locate(cx, cy)

        if index is None:
            self.fallbacks += 1
            candidates = self.reduced
        else:
            candidates = [self.reduced[i] for i in self.cutting.conflict_lists[index]]

        res = sum(1 for r in candidates if r.x1 < cx <= r.x2 and r.y < cy)

        return res

    def space_units(self):
        return self.size + self.cutting.space_units()


class SampleLevel(object):
    def __init__(self, z, prob, counter, indices):
        self.z = z
        self.prob = prob
        self.counter = counter
        self.indices = indices


class RefinedLadderCounter(object):
    """
    (1 + eps)-approximate counting for standard 3-sided rectangle
    stabbing.

    Queries are first answered by the shared table. Above its level two
    level ladders bracket the count into [z, 4z], and the bracket is
    refined by a verified random sample of the rectangles kept for that z.

    Parameters
    ----------
    rects: list of StabRect3S
        The rectangles.
    eps: float
        The approximation parameter in (0, 1].
    config: Config or None
        The constants.
    """

    def __init__(self, rects, eps, config=None):
        check_eps(eps)

        self.eps = eps
        self.config = resolve(config)
        self.n = len(rects)
        self.reduced, self.x_map, self.y_map = rank_space_reduce(list(rects))
        self.width = 2 * self.n
        self.height = self.n
        self.scale = sampling_scale(self.n, eps, self.config.c1)
        self.attempts = 0

        if self.n == 0:
            self.levels = []
            return

        self._build_levels()
        self._build_refinement()

        log.info(
            "Stab counter: n={0}, levels={1}, samples={2}, space={3}".format(
                self.n, len(self.levels), len(self.samples), self.space_units()
            )
        )

    def _build_levels(self):
        n = self.n
        low = table_level(n)
        mid = max(low, int(math.ceil(math.log2(max(n, 2)))))

        steps1 = int(math.ceil(math.log2(mid / float(low))))
        top1 = low * 2**steps1
        steps2 = max(0, int(math.ceil(math.log2(n / float(top1)))))

        self.table = build_shared_table(self.reduced, self.config)

        self.levels = [self.table.cutting] + [
            build_shallow_cutting(self.reduced, low * 2**j, keep_conflicts=False)
            for j in range(1, steps1 + steps2 + 1)
        ]
        self.zs = [low * 2**j for j in range(len(self.levels))]
        self.split = steps1

        self.ladder1 = LevelLadder(self.levels[: steps1 + 1], self.height)
        self.ladder2 = LevelLadder(self.levels[steps1:], self.height)

    def _route_grid(self):
        """
        The ladder index of every position, -1 where the table answers.
        """

        cxs = np.arange(1, self.width + 1)
        cys = np.arange(1, self.height + 1)

        cnt = np.zeros((len(cxs), len(cys)), dtype=int)

        for cutting in self.levels:
            ytop = cutting.ytops[(cxs - 1) // cutting.level]
            cnt += cys[None, :] > ytop[:, None]

        res = cnt - 1

        return res

    def _build_refinement(self):
        probs = [min(1.0, self.scale / z) for z in self.zs]
        exact = [z for z, p in zip(self.zs, probs) if p >= 1.0]

        self.exact_counter = None

        if len(exact) > 0:
            self.exact_counter = CutCounter(_closed(self.reduced), 4 * max(exact) + 1)

        self.samples = {}
        pending = [j for j, p in enumerate(probs) if p < 1.0]

        if len(pending) == 0:
            return

        routes = self._route_grid()
        k = oracle.grid_counts_3s(self.reduced, self.width, self.height)[1:, 1:]

        for j in pending:
            z = self.zs[j]
            prob = probs[j]
            mask = routes == j
            k_sel = k[mask]

            def draw(seed, prob=prob):
                rng = make_rng(seed)
                return np.flatnonzero(bernoulli_mask(self.n, prob, rng))

            def is_suitable(indices, prob=prob, mask=mask, k_sel=k_sel):
                sample = [self.reduced[i] for i in indices]
                s = oracle.grid_counts_3s(sample, self.width, self.height)[1:, 1:]
                error = np.abs(k_sel - s[mask] / prob)
                return bool(np.all(error <= self.eps * k_sel + 1.0e-9))

            indices, attempts = draw_until_suitable(
                draw,
                is_suitable,
                self.config.seed + 1000 * (j + 1),
                self.config.attempt_cap,
                "stab2d z={0}".format(z),
            )
            self.attempts += attempts

            sample = [self.reduced[i] for i in indices]
            level = int(math.ceil((1.0 + self.eps) * 4 * z * prob)) + 1
            counter = CutCounter(_closed(sample), level)

            self.samples[j] = SampleLevel(z, prob, counter, indices)

    def bracket(self, cx, cy):
        """
        Route a position through the table and the two ladders.

        Returns
        -------
        result: LevelResult
            TABLE_HIT with the exact answer, or BRACKET with the index of
            z in the level sequence.
        """

        res = query_shared_table(self.table, cx, cy)

        if res.status == TABLE_HIT:
            return res

        res = query_level_ladder(self.ladder1, cx, cy)

        if res.status == BRACKET:
            return res

        res = query_level_ladder(self.ladder2, cx, cy)

        if res.status == ABOVE_TOP:
            index = len(self.levels) - 1
        else:
            index = self.split + res.index

        z = self.zs[index]

        return LevelResult(BRACKET, ApproxAnswer.capprox(z, 4), index)

    def query_position(self, cx, cy):
        """
        Answer a query given by its rank-space position.

        Raises
        ------
        QueryOutOfGridError
            If the position is outside [0, 2n] x [0, n].
        """

        _check_position(cx, cy, self.width, self.height)

        if self.n == 0 or cx == 0 or cy == 0:
            return ApproxAnswer.exact(0)

        res = self.bracket(cx, cy)

        if res.status == TABLE_HIT:
            return res.answer

        sample = self.samples.get(res.index)

        if sample is None:
            k = self.exact_counter.count((cx, cy))
            return ApproxAnswer.exact(k)

        value = sample.counter.count((cx, cy)) / sample.prob

        return ApproxAnswer.epsapprox(value, self.eps)

    def query(self, q):
        """
        Approximate the number of rectangles stabbed by the point q.
        """

        cx = self.x_map.position(q[0])
        cy = self.y_map.position(q[1])

        res = self.query_position(cx, cy)

        return res

    def sampled_objects(self):
        return sum(len(s.indices) for s in self.samples.values())

    def space_units(self):
        if self.n == 0:
            return 0

        res = self.table.space_units()
        res += self.ladder1.space_units() + self.ladder2.space_units()

        if self.exact_counter is not None:
            res += self.exact_counter.space_units()

        res += sum(s.counter.space_units() for s in self.samples.values())

        return res


def build_stab_counter(rects, eps, config=None):
    """
    Build the (1 + eps)-approximate 3-sided stabbing counter.

    Raises
    ------
    SuitabilityError
        If a refinement sample cannot be verified within the attempt cap.
    """

    counter = RefinedLadderCounter(rects, eps, config)

    return counter


def query_stab_counter(counter, q):
    return counter.query(q)


class ColoredStabCounter(object):
    """
    (1 + eps)-approximate coloured counting for intervals, planar
    dominance and 3-sided rectangle stabbing.
    """

    def __init__(self, setting, objects, eps, config=None):
        self.setting = setting
        rects, self.adapter = embed_setting(setting, objects, doubled=True)

        self.decomposition = union_decompose(rects)
        self.counter = build_stab_counter(self.decomposition.all, eps, config)

    def query(self, q):
        res = self.counter.query(self.adapter(q))

        return res

    def space_units(self):
        return self.counter.space_units()


def build_colored_counter(setting, objects, eps, config=None):
    """
    Compose embedding, union decomposition and the stab counter.
    """

    res = ColoredStabCounter(setting, objects, eps, config)

    return res
