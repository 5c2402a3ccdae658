#
#   Exact brute-force counting and enumeration of distinct queries.
#

import logging
import math

import numpy as np

from colorcount.errors import BadParamsError, SettingUnsupportedError
from colorcount.geom_core import (
    ApproxAnswer,
    ColorApproximator,
    ColoredReporter,
)

log = logging.getLogger(__name__)

# geometric settings
INTERVAL_STAB_1D = "interval_stab_1d"
DOM2D = "dom2d"
STAB3S_2D = "stab3s_2d"
DOM3D = "dom3d"
STAB5S_3D = "stab5s_3d"
RANGE3S_2D = "range3s_2d"
RANGE4S_2D = "range4s_2d"
ORTHO_RD = "ortho_rd"

SETTINGS = [
    INTERVAL_STAB_1D,
    DOM2D,
    STAB3S_2D,
    DOM3D,
    STAB5S_3D,
    RANGE3S_2D,
    RANGE4S_2D,
    ORTHO_RD,
]

# upper limit of booleans held in one containment mask
MASK_BUDGET = 2000000


class QueryUniverse(object):
    """
    The combinatorially distinct queries of a dataset.

    Parameters
    ----------
    setting: str
        The geometric setting.
    array: ~np.ndarray
        One flattened query per row.
    complete: bool
        False if the universe was subsampled.
    """

    def __init__(self, setting, array, complete=True):
        self.setting = setting
        self.array = np.asarray(array, dtype=float)
        self.complete = complete
        self._queries = None

    def __len__(self):
        return len(self.array)

    def __iter__(self):
        return iter(self.queries)

    @property
    def queries(self):
        if self._queries is None:
            self._queries = [_descriptor(self.setting, row) for row in self.array]

        return self._queries


def check_setting(setting):
    if setting not in SETTINGS:
        raise SettingUnsupportedError("Setting is unknown: {0}".format(setting))


def color_of(obj):
    """
    The colour of an object, or the tag of an uncoloured one.
    """

    color = getattr(obj, "color", None)

    if color is None:
        color = obj.tag

    return color


def _number(value):
    value = float(value)

    if value.is_integer():
        return int(value)

    return value


def _descriptor(setting, row):
    values = [_number(v) for v in row]

    if setting == INTERVAL_STAB_1D:
        return values[0]
    elif setting == ORTHO_RD:
        dim = len(values) // 2
        return (tuple(values[:dim]), tuple(values[dim:]))

    return tuple(values)


def _flatten(setting, q):
    if setting == INTERVAL_STAB_1D:
        if isinstance(q, (tuple, list)):
            return (q[0],)
        return (q,)
    elif setting == ORTHO_RD:
        lo, hi = q
        return tuple(lo) + tuple(hi)

    return tuple(q)


def contains(setting, obj, q):
    """
    Decide whether a query contains or stabs an object.

    All predicates are closed.
    """

    if setting == INTERVAL_STAB_1D:
        (x,) = _flatten(setting, q)
        res = obj.lo <= x <= obj.hi
    elif setting in [DOM2D, DOM3D]:
        res = all(p >= v for p, v in zip(obj.coords, q))
    elif setting in [STAB3S_2D, STAB5S_3D]:
        res = obj.contains(q)
    elif setting == RANGE3S_2D:
        x1, x2, y = q
        px, py = obj.coords
        res = x1 <= px <= x2 and py >= y
    elif setting == RANGE4S_2D:
        x1, x2, y1, y2 = q
        px, py = obj.coords
        res = x1 <= px <= x2 and y1 <= py <= y2
    elif setting == ORTHO_RD:
        lo, hi = q
        res = all(a <= p <= b for p, a, b in zip(obj.coords, lo, hi))
    else:
        raise SettingUnsupportedError("Setting is unknown: {0}".format(setting))

    return res


def exact_colored_report(setting, objects, q):
    """
    The sorted colours of the objects that the query contains.
    """

    res = sorted(set(color_of(obj) for obj in objects if contains(setting, obj, q)))

    return res


def exact_colored_count(setting, objects, q):
    """
    The exact number of distinct colours present in the query.

    Parameters
    ----------
    setting: str
        The geometric setting.
    objects: list
        The coloured objects.
    q: tuple
        The query.

    Returns
    -------
    k: int
        The number of colours.
    """

    k = len(exact_colored_report(setting, objects, q))

    return k


def exact_standard_count(setting, objects, q):
    """
    The exact number of objects that the query contains or stabs.
    """

    res = sum(1 for obj in objects if contains(setting, obj, q))

    return res


def object_array(setting, objects):
    """
    The numeric columns of the objects used in vectorised containment.
    """

    if setting == INTERVAL_STAB_1D:
        rows = [(obj.lo, obj.hi) for obj in objects]
    elif setting == STAB3S_2D:
        rows = [(obj.x1, obj.x2, obj.y) for obj in objects]
    elif setting == STAB5S_3D:
        rows = [(obj.x1, obj.x2, obj.y1, obj.y2, obj.ztop) for obj in objects]
    elif setting in SETTINGS:
        rows = [obj.coords for obj in objects]
    else:
        raise SettingUnsupportedError("Setting is unknown: {0}".format(setting))

    res = np.array(rows, dtype=float)

    return res


def query_array(setting, queries):
    """
    One flattened query per row.
    """

    if isinstance(queries, QueryUniverse):
        return queries.array

    rows = [_flatten(setting, q) for q in queries]

    if len(rows) == 0:
        return np.zeros((0, 1))

    res = np.array(rows, dtype=float)

    return res


def _mask(setting, objs, qs):
    if setting == INTERVAL_STAB_1D:
        x = qs[:, 0, None]
        res = (objs[:, 0] <= x) & (x <= objs[:, 1])
    elif setting == STAB3S_2D:
        x = qs[:, 0, None]
        y = qs[:, 1, None]
        res = (objs[:, 0] <= x) & (x <= objs[:, 1]) & (objs[:, 2] <= y)
    elif setting == STAB5S_3D:
        x = qs[:, 0, None]
        y = qs[:, 1, None]
        z = qs[:, 2, None]
        res = (
            (objs[:, 0] <= x)
            & (x <= objs[:, 1])
            & (objs[:, 2] <= y)
            & (y <= objs[:, 3])
            & (z <= objs[:, 4])
        )
    elif setting in [DOM2D, DOM3D]:
        res = np.all(objs[None, :, :] >= qs[:, None, :], axis=2)
    elif setting == RANGE3S_2D:
        px = objs[:, 0]
        py = objs[:, 1]
        res = (qs[:, 0, None] <= px) & (px <= qs[:, 1, None]) & (py >= qs[:, 2, None])
    elif setting == RANGE4S_2D:
        px = objs[:, 0]
        py = objs[:, 1]
        res = (
            (qs[:, 0, None] <= px)
            & (px <= qs[:, 1, None])
            & (qs[:, 2, None] <= py)
            & (py <= qs[:, 3, None])
        )
    elif setting == ORTHO_RD:
        dim = objs.shape[1]
        lo = qs[:, None, :dim]
        hi = qs[:, None, dim:]
        res = np.all((objs[None, :, :] >= lo) & (objs[None, :, :] <= hi), axis=2)
    else:
        raise SettingUnsupportedError("Setting is unknown: {0}".format(setting))

    return res


def iter_containment(setting, objects, queries):
    """
    Vectorised containment in chunks of queries.

    Yields
    ------
    start: int
        The index of the first query of the chunk.
    mask: ~np.ndarray of bool
        Shape (chunk, n), True where the query contains the object.
    """

    check_setting(setting)

    qs = query_array(setting, queries)
    total = len(qs)
    n = len(objects)

    if n == 0:
        if total > 0:
            yield 0, np.zeros((total, 0), dtype=bool)
        return

    objs = object_array(setting, objects)
    chunk = max(1, MASK_BUDGET // (n * max(objs.shape[1], 1)))

    for start in range(0, total, chunk):
        yield start, _mask(setting, objs, qs[start : start + chunk])


def standard_counts(setting, objects, queries):
    """
    The exact standard counts of many queries.
    """

    qs = query_array(setting, queries)
    res = np.zeros(len(qs), dtype=int)

    for start, mask in iter_containment(setting, objects, QueryUniverse(setting, qs)):
        res[start : start + len(mask)] = mask.sum(axis=1)

    return res


def presence_matrix(setting, objects, queries, num_colors=None):
    """
    Which colours are present in each query.

    Parameters
    ----------
    setting: str
        The geometric setting.
    objects: list
        The coloured objects.
    queries: list or QueryUniverse
        The queries.
    num_colors: int or None
        The size of the colour table. None means max colour + 1.

    Returns
    -------
    presence: ~np.ndarray of bool
        Shape (len(queries), num_colors).
    """

    qs = query_array(setting, queries)
    colors = np.array([color_of(obj) for obj in objects], dtype=int)

    if num_colors is None:
        num_colors = int(colors.max()) + 1 if len(colors) > 0 else 0

    presence = np.zeros((len(qs), num_colors), dtype=bool)

    if len(colors) == 0:
        return presence

    onehot = np.zeros((len(colors), num_colors), dtype=np.int32)
    onehot[np.arange(len(colors)), colors] = 1

    for start, mask in iter_containment(setting, objects, QueryUniverse(setting, qs)):
        presence[start : start + len(mask)] = (mask.astype(np.int32) @ onehot) > 0

    return presence


def colored_counts(setting, objects, queries, num_colors=None):
    """
    The exact coloured counts of many queries.
    """

    res = presence_matrix(setting, objects, queries, num_colors).sum(axis=1)

    return res


def _distinct_finite(values):
    values = [v for v in values if not math.isinf(v)]

    return np.unique(np.array(values, dtype=float))


def axis_candidates(values):
    """
    One representative per elementary piece of the axis arrangement.

    The distinct finite values, the midpoints between them and one
    coordinate beyond each end.
    """

    distinct = _distinct_finite(values)

    if len(distinct) == 0:
        return np.array([[0.0]])

    mids = 0.5 * (distinct[:-1] + distinct[1:])
    res = np.sort(
        np.concatenate([[distinct[0] - 1.0], distinct, mids, [distinct[-1] + 1.0]])
    )

    return res.reshape(-1, 1)


def range_pairs(values):
    """
    All non-empty ranges [a, b] with a <= b from the distinct values.
    """

    distinct = _distinct_finite(values)
    i, j = np.triu_indices(len(distinct))

    res = np.column_stack([distinct[i], distinct[j]])

    return res.reshape(-1, 2)


def _blocks(setting, objects, dim):
    if setting == INTERVAL_STAB_1D:
        blocks = [axis_candidates([o.lo for o in objects] + [o.hi for o in objects])]
    elif setting in [DOM2D, DOM3D]:
        blocks = [
            axis_candidates([o.coords[axis] for o in objects]) for axis in range(dim)
        ]
    elif setting == STAB3S_2D:
        blocks = [
            axis_candidates([o.x1 for o in objects] + [o.x2 for o in objects]),
            axis_candidates([o.y for o in objects]),
        ]
    elif setting == STAB5S_3D:
        blocks = [
            axis_candidates([o.x1 for o in objects] + [o.x2 for o in objects]),
            axis_candidates([o.y1 for o in objects] + [o.y2 for o in objects]),
            axis_candidates([o.ztop for o in objects]),
        ]
    elif setting == RANGE3S_2D:
        blocks = [
            range_pairs([o.coords[0] for o in objects]),
            _distinct_finite([o.coords[1] for o in objects]).reshape(-1, 1),
        ]
    elif setting in [RANGE4S_2D, ORTHO_RD]:
        blocks = [range_pairs([o.coords[axis] for o in objects]) for axis in range(dim)]
    else:
        raise SettingUnsupportedError("Setting is unknown: {0}".format(setting))

    return blocks


def _empty_query(setting, objects, dim):
    beyond = 1.0 + max(max(o.coords) for o in objects) if len(objects) > 0 else 1.0

    if setting == RANGE3S_2D:
        res = [beyond, beyond, beyond]
    else:
        res = [beyond] * (2 * dim)

    return np.array([res])


def enumerate_queries(setting, objects, max_queries=None, seed=0, dim=None):
    """
    Enumerate the combinatorially distinct queries of a dataset.

    Parameters
    ----------
    setting: str
        The geometric setting.
    objects: list
        The objects of the setting.
    max_queries: int or None
        If the universe is larger, a seeded subset of about this size is
        returned and flagged incomplete.
    seed: int
        The seed of the subset.
    dim: int or None
        The dimension of ORTHO_RD data, taken from the objects if None.

    Returns
    -------
    universe: QueryUniverse
        The queries. Every outcome set is realised at least once if the
        universe is complete.

    Raises
    ------
    SettingUnsupportedError
        If the setting is unknown.
    """

    check_setting(setting)

    if setting == ORTHO_RD:
        if len(objects) > 0:
            dim = objects[0].dim
        elif dim is None:
            raise BadParamsError("The dimension of empty data must be given.")
    elif setting in [DOM2D, RANGE4S_2D]:
        dim = 2
    elif setting == DOM3D:
        dim = 3

    blocks = _blocks(setting, objects, dim)
    sizes = [len(block) for block in blocks]
    total = math.prod(sizes)
    complete = True

    if total == 0:
        index = np.zeros((0, len(blocks)), dtype=int)
    elif max_queries is not None and total > max_queries:
        rng = np.random.default_rng(seed)
        index = np.column_stack(
            [rng.integers(0, size, size=max_queries) for size in sizes]
        )
        index = np.unique(index, axis=0)
        complete = False
        log.debug(
            "Sampled {0} of {1} queries for {2}".format(len(index), total, setting)
        )
    else:
        grids = np.meshgrid(*[np.arange(size) for size in sizes], indexing="ij")
        index = np.column_stack([grid.reshape(-1) for grid in grids])

    array = np.hstack([block[index[:, i]] for i, block in enumerate(blocks)])

    if setting == ORTHO_RD:
        order = list(range(0, 2 * dim, 2)) + list(range(1, 2 * dim, 2))
        array = array[:, order]

    if setting in [RANGE3S_2D, RANGE4S_2D, ORTHO_RD]:
        array = np.vstack([array, _empty_query(setting, objects, dim)])

    universe = QueryUniverse(setting, array, complete)

    return universe


class OracleCounter(object):
    """
    Exact counting by scanning every object.

    Parameters
    ----------
    setting: str
        The geometric setting.
    objects: list
        The objects.
    colored: bool
        Count distinct colours if True, objects otherwise.
    """

    def __init__(self, setting, objects, colored=True):
        check_setting(setting)

        self.setting = setting
        self.objects = list(objects)
        self.colored = colored

    def query(self, q):
        if self.colored:
            k = exact_colored_count(self.setting, self.objects, q)
        else:
            k = exact_standard_count(self.setting, self.objects, q)

        return ApproxAnswer.exact(k)

    def space_units(self):
        return len(self.objects)


class OracleReporter(ColoredReporter):
    """
    Capped colour reporting by scanning every object.
    """

    def __init__(self, setting, objects):
        check_setting(setting)

        self.setting = setting
        self.objects = list(objects)

    def report_colors(self, q, cap):
        colors = exact_colored_report(self.setting, self.objects, q)

        return colors[: cap + 1]

    def restricted(self, objects):
        return OracleReporter(self.setting, objects)

    def space_units(self):
        return len(self.objects)


class OracleApproximator(ColorApproximator):
    """
    A constant-factor approximator that returns k / sqrt(factor).
    """

    def __init__(self, setting, objects, factor=4.0):
        check_setting(setting)

        self.setting = setting
        self.objects = list(objects)
        self.factor = factor

    def approximate(self, q):
        k = exact_colored_count(self.setting, self.objects, q)

        return ApproxAnswer.capprox(k / math.sqrt(self.factor), self.factor)

    def space_units(self):
        return len(self.objects)


def grid_counts_3s(rects, width, height):
    """
    Exact stab counts at every rank-space position of reduced 3-sided
    rectangles.

    A rectangle contains the position (cx, cy) iff x1 < cx <= x2 and
    y < cy.

    Parameters
    ----------
    rects: list of StabRect3S
        Rank-space reduced rectangles.
    width: int
        The largest x position.
    height: int
        The largest y position.

    Returns
    -------
    counts: ~np.ndarray of int
        Shape (width + 1, height + 1).
    """

    diff = np.zeros((width + 2, height + 2), dtype=np.int64)

    if len(rects) > 0:
        x1 = np.array([r.x1 for r in rects], dtype=int) + 1
        x2 = np.array([r.x2 for r in rects], dtype=int) + 1
        y = np.array([r.y for r in rects], dtype=int) + 1

        np.add.at(diff, (x1, y), 1)
        np.add.at(diff, (x2, y), -1)

    counts = np.cumsum(np.cumsum(diff, axis=0), axis=1)

    return counts[: width + 1, : height + 1]


def grid_counts_rect5(boxes, shape):
    """
    Exact stab counts at every rank-space position of reduced boxes.

    A box contains the position (cx, cy, cz) iff x1 < cx <= x2,
    y1 < cy <= y2 and cz <= ztop.

    Only meant for small inputs, the array has (2n + 1)^2 (n + 1) entries
    for n boxes. Use iter_slices_rect5 otherwise.

    Parameters
    ----------
    boxes: list of Rect5
        Rank-space reduced boxes.
    shape: tuple of int
        The largest x, y and z positions.

    Returns
    -------
    counts: ~np.ndarray of int
        Shape (shape[0] + 1, shape[1] + 1, shape[2] + 1).
    """

    wx, wy, wz = shape
    counts = np.zeros((wx + 1, wy + 1, wz + 1), dtype=np.int64)

    for cz, plane in iter_slices_rect5(boxes, shape):
        counts[:, :, cz] = plane

    return counts


def iter_slices_rect5(boxes, shape, levels=None):
    """
    Exact stab counts of reduced boxes, one z position at a time.

    The z positions are swept from the top down while a 2D difference
    array collects the boxes with ztop >= cz, so memory stays at one
    (x, y) slice.

    Parameters
    ----------
    boxes: list of Rect5
        Rank-space reduced boxes.
    shape: tuple of int
        The largest x, y and z positions.
    levels: set of int or None
        The z positions to yield. None means all of them.

    Yields
    ------
    cz: int
        The z position, in decreasing order.
    counts: ~np.ndarray of int
        Shape (shape[0] + 1, shape[1] + 1), equal to
        grid_counts_rect5(boxes, shape)[:, :, cz].
    """

    wx, wy, wz = shape
    diff = np.zeros((wx + 2, wy + 2), dtype=np.int64)

    x1 = np.array([b.x1 for b in boxes], dtype=int) + 1
    x2 = np.array([b.x2 for b in boxes], dtype=int) + 1
    y1 = np.array([b.y1 for b in boxes], dtype=int) + 1
    y2 = np.array([b.y2 for b in boxes], dtype=int) + 1
    ztop = np.minimum(np.array([b.ztop for b in boxes], dtype=int), wz)

    order = np.argsort(-ztop, kind="stable")
    neg_sorted = -ztop[order]
    start = 0

    for cz in range(wz, -1, -1):
        stop = int(np.searchsorted(neg_sorted, -cz, side="right"))

        if stop > start:
            batch = order[start:stop]
            np.add.at(diff, (x1[batch], y1[batch]), 1)
            np.add.at(diff, (x2[batch], y1[batch]), -1)
            np.add.at(diff, (x1[batch], y2[batch]), -1)
            np.add.at(diff, (x2[batch], y2[batch]), 1)
            start = stop

        if levels is not None and cz not in levels:
            continue

        counts = np.cumsum(np.cumsum(diff, axis=0), axis=1)

        yield cz, counts[: wx + 1, : wy + 1]
