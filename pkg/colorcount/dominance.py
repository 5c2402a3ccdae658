#
#   Exact dominance counting and reporting.
#

import numpy as np


class DominanceIndex(object):
    """
    Exact dominance counting and reporting over a static point set.

    A stored point p is reported for the query q iff p[i] <= q[i] on every
    axis. Other orientations are handled by negating coordinates before
    they are stored and queried. The points are sorted on the first axis
    and the remaining axes are filtered with numpy.

    Parameters
    ----------
    points: array_like
        The points, shape (m, d). Infinite coordinates are allowed.
    payloads: list
        One payload per point, returned by report.
    """

    def __init__(self, points, payloads):
        if len(payloads) == 0:
            points = np.zeros((0, 1))
        else:
            points = np.asarray(points, dtype=float)

        order = np.argsort(points[:, 0], kind="stable")

        self.points = points[order]
        self.keys = self.points[:, 0].copy()
        self.payloads = [payloads[i] for i in order]

    def __len__(self):
        return len(self.payloads)

    def _matches(self, q):
        q = np.asarray(q, dtype=float)
        end = int(np.searchsorted(self.keys, q[0], side="right"))

        if end == 0:
            return np.zeros(0, dtype=int)

        mask = np.all(self.points[:end, 1:] <= q[1:], axis=1)
        res = np.flatnonzero(mask)

        return res

    def count(self, q):
        """
        The number of stored points dominated by q.
        """

        res = len(self._matches(q))

        return res

    def report(self, q, cap=None):
        """
        Report the payloads of the points dominated by q.

        Parameters
        ----------
        q: tuple
            The query point.
        cap: int or None
            Stop after cap + 1 payloads.

        Returns
        -------
        res: list
            The payloads.
        """

        matches = self._matches(q)

        if cap is not None:
            matches = matches[: cap + 1]

        res = [self.payloads[i] for i in matches]

        return res
