#
#   General reductions from colour reporting to approximate colour counting.
#

import logging
import math

import numpy as np

from colorcount.config import check_eps, log_n, resolve, sampling_scale
from colorcount.errors import BadParamsError
from colorcount.geom_core import (
    ApproxAnswer,
    ColorApproximator,
    ColoredReporter,
    num_colors,
)
import colorcount.oracle as oracle
from colorcount.sampling import draw_until_suitable, sample_colors

log = logging.getLogger(__name__)

__all__ = [
    "ColoredReporter",
    "ColorApproximator",
    "GE",
    "LT",
    "SampleVerifier",
    "sample_colors",
    "verify_refinement_sample",
    "verify_decision_sample",
    "RefinementStructure",
    "build_refinement",
    "query_refinement",
    "ReductionOne",
    "build_reduction1",
    "query_reduction1",
    "DecisionStructure",
    "build_decision",
    "query_decision",
    "ReductionTwo",
    "build_reduction2",
    "query_reduction2",
]

# verdicts of a decision structure
GE = "ge"
LT = "lt"

# the largest eps a decision structure works with
DECISION_EPS_MAX = 0.5


class SampleVerifier(object):
    """
    Exact per-query colour presence over a query universe, used to
    certify colour samples.

    Parameters
    ----------
    setting: str
        The geometric setting.
    objects: list
        The coloured objects.
    universe: QueryUniverse or None
        The queries to certify against. None enumerates all of them.
    """

    def __init__(self, setting, objects, universe=None):
        if universe is None:
            universe = oracle.enumerate_queries(setting, objects)

        if not universe.complete:
            log.warning(
                "Verifying samples over an incomplete universe of {0} queries".format(
                    len(universe)
                )
            )

        self.setting = setting
        self.universe = universe
        self.n = len(objects)
        self.num_colors = num_colors(objects)
        self.presence = oracle.presence_matrix(
            setting, objects, universe, self.num_colors
        )
        self.counts = self.presence.sum(axis=1)
        self.colors = np.array([oracle.color_of(obj) for obj in objects], dtype=int)

    def sampled_counts(self, sample):
        """
        The number of sampled colours present in each query.
        """

        if len(sample) == 0:
            return np.zeros(len(self.counts), dtype=int)

        res = self.presence[:, np.asarray(sample, dtype=int)].sum(axis=1)

        return res

    def sampled_size(self, sample):
        """
        The number of objects whose colour is sampled.
        """

        res = int(np.count_nonzero(np.isin(self.colors, sample)))

        return res


def verify_refinement_sample(
    sample, verifier, eps, z, prob, floor_k, approx_factor, lower=None, size_slack=10.0
):
    """
    Check that a colour sample is suitable for a refinement structure.

    Parameters
    ----------
    sample: list of int
        The sampled colours R.
    verifier: SampleVerifier
        The exact presence over the universe.
    eps: float
        The approximation parameter.
    z: float
        The scale of the structure.
    prob: float
        The sampling probability M.
    floor_k: float
        Queries with at most this many colours are answered exactly
        elsewhere and are not checked.
    approx_factor: float
        Queries with more than approx_factor * z colours are not routed
        here and are not checked.
    lower: float or None
        Queries with fewer colours are not routed here. None means z.
    size_slack: float
        The objects of sampled colours must number at most
        size_slack * n * M.

    Returns
    -------
    res: bool
        True if |k - |R & q| / M| <= eps k for every checked query and
        the size bound holds.
    """

    if lower is None:
        lower = z

    if verifier.sampled_size(sample) > size_slack * verifier.n * prob:
        return False

    k = verifier.counts
    scope = (k > floor_k) & (k >= lower) & (k <= approx_factor * z)

    if not np.any(scope):
        return True

    estimate = verifier.sampled_counts(sample)[scope] / prob
    error = np.abs(k[scope] - estimate)

    res = bool(np.all(error <= eps * k[scope] + 1.0e-9))

    return res


def _sampled_objects(objects, sample):
    chosen = set(sample)

    res = [obj for obj in objects if oracle.color_of(obj) in chosen]

    return res


class RefinementStructure(object):
    """
    Turns a constant-factor bracket k in [z, C z] into a (1 + eps)
    estimate by counting the colours of a verified sample.

    Attributes
    ----------
    z: float
        The scale.
    prob: float
        The sampling probability M = min(1, c1 eps^-2 ln(n) / z).
    sample: list of int
        The verified colour sample R.
    reporter: ColoredReporter
        Capped reporting over the objects of sampled colours.
    cap: int
        The reporting cap ceil((1 + eps) C z M).
    """

    def __init__(self, z, prob, sample, reporter, cap, sampled_size, attempts):
        self.z = z
        self.prob = prob
        self.sample = sample
        self.reporter = reporter
        self.cap = cap
        self.sampled_size = sampled_size
        self.attempts = attempts

    def query(self, q):
        colors = self.reporter.report_colors(q, self.cap)

        res = len(colors) / self.prob

        return res

    def space_units(self):
        res = self.reporter.space_units() + len(self.sample)

        return res


def build_refinement(
    setting,
    objects,
    reporter_factory,
    z,
    eps,
    approx_factor,
    config=None,
    verifier=None,
    lower=None,
    seed=None,
):
    """
    Build a refinement structure at scale z.

    Parameters
    ----------
    setting: str
        The geometric setting.
    objects: list
        The coloured objects.
    reporter_factory: func
        Called with a list of objects, returns a ColoredReporter.
    z: float
        The scale, at least 1.
    eps: float
        The approximation parameter in (0, 1].
    approx_factor: float
        The factor C of the bracket k in [z, C z].
    config: Config or None
        The constants.
    verifier: SampleVerifier or None
        The presence over the query universe, computed if None.
    lower: float or None
        The smallest colour count routed here, z if None.
    seed: int or None
        The seed of the first sample, config.seed if None.

    Returns
    -------
    structure: RefinementStructure
        The structure.

    Raises
    ------
    SuitabilityError
        If no sample is suitable within the attempt cap.
    """

    check_eps(eps)
    config = resolve(config)

    if z < 1:
        raise BadParamsError("The scale must be at least 1: {0}".format(z))

    if verifier is None:
        verifier = SampleVerifier(setting, objects)

    if seed is None:
        seed = config.seed

    floor_k = sampling_scale(len(objects), eps, config.c1)
    prob = min(1.0, floor_k / z)
    colors = range(verifier.num_colors)

    def is_suitable(sample):
        return verify_refinement_sample(
            sample,
            verifier,
            eps,
            z,
            prob,
            floor_k,
            approx_factor,
            lower=lower,
            size_slack=config.size_slack,
        )

    sample, attempts = draw_until_suitable(
        lambda s: sample_colors(colors, prob, s),
        is_suitable,
        seed,
        config.attempt_cap,
        "refinement z={0:.1f}".format(z),
    )

    chosen = _sampled_objects(objects, sample)
    cap = int(math.ceil((1.0 + eps) * approx_factor * z * prob))

    structure = RefinementStructure(
        z, prob, sample, reporter_factory(chosen), cap, len(chosen), attempts
    )

    log.debug(
        "Refinement z={0:.1f}: M={1:.4f}, colours={2}, objects={3}".format(
            z, prob, len(sample), len(chosen)
        )
    )

    return structure


def query_refinement(structure, q):
    return structure.query(q)


def refinement_scales(n, eps, approx_factor):
    """
    The scales (sqrt C)^i eps^-2 ln(n) for i = 0 .. ceil(log_{sqrt C}(eps^2 n)).
    """

    step = math.sqrt(approx_factor)
    base = eps ** (-2) * log_n(n)
    top = max(0, int(math.ceil(math.log(max(eps**2 * n, 1.0)) / math.log(step))))

    res = [base * step**i for i in range(top + 1)]

    return res


class ReductionOne(object):
    """
    (1 + eps)-approximate colour counting from capped colour reporting
    and a sqrt(C)-approximation.

    Small counts are reported exactly. Larger counts are bracketed by the
    approximation and refined by the structure of the largest scale z
    with z <= k_a.

    Parameters
    ----------
    setting: str
        The geometric setting.
    objects: list
        The coloured objects.
    reporter: ColoredReporter
        Capped reporting over all objects.
    approximator: ColorApproximator
        A sqrt(C)-approximation in lower-bound form.
    reporter_factory: func
        Builds the reporters of the sampled objects.
    eps: float
        The approximation parameter in (0, 1].
    config: Config or None
        The constants.
    universe: QueryUniverse or None
        The queries the samples are certified against.
    """

    def __init__(
        self,
        setting,
        objects,
        reporter,
        approximator,
        reporter_factory,
        eps,
        config=None,
        universe=None,
    ):
        check_eps(eps)

        self.eps = eps
        self.config = resolve(config)
        self.reporter = reporter
        self.approximator = approximator
        self.n = len(objects)
        self.approx_factor = float(approximator.factor) ** 2
        self.floor_k = sampling_scale(self.n, eps, self.config.c1)
        self.cap = int(math.floor(self.floor_k))
        self.scales = refinement_scales(self.n, eps, self.approx_factor)

        verifier = SampleVerifier(setting, objects, universe)

        self.ladder = []

        for i, z in enumerate(self.scales):
            self.ladder.append(
                build_refinement(
                    setting,
                    objects,
                    reporter_factory,
                    z,
                    eps,
                    self.approx_factor,
                    config=self.config,
                    verifier=verifier,
                    lower=z if i > 0 else 0,
                    seed=self.config.seed + 1000 * i,
                )
            )

        self.sampled_total = sum(r.sampled_size for r in self.ladder)

        if self.sampled_total > 2.0 * self.config.size_slack * self.n:
            log.warning(
                "Refinement ladder holds {0} objects for n={1}".format(
                    self.sampled_total, self.n
                )
            )

        log.info(
            "Reduction-I: n={0}, C={1:.0f}, levels={2}, sampled objects={3}".format(
                self.n, self.approx_factor, len(self.ladder), self.sampled_total
            )
        )

    def _refinement_index(self, q):
        k_a = self.approximator.approximate(q).value
        res = max(0, int(np.searchsorted(self.scales, k_a, side="right")) - 1)

        return res

    def route(self, q):
        """
        The refinement index used for q, or None on the exact path.
        """

        colors = self.reporter.report_colors(q, self.cap)

        if len(colors) <= self.cap:
            return None

        return self._refinement_index(q)

    def query(self, q):
        colors = self.reporter.report_colors(q, self.cap)

        if len(colors) <= self.cap:
            return ApproxAnswer.exact(len(colors))

        index = self._refinement_index(q)
        value = self.ladder[index].query(q)

        res = ApproxAnswer.epsapprox(value, self.eps)

        return res

    def space_units(self):
        res = (
            self.reporter.space_units()
            + self.approximator.space_units()
            + sum(r.space_units() for r in self.ladder)
        )

        return res


def build_reduction1(
    setting,
    objects,
    reporter,
    approximator,
    eps,
    reporter_factory=None,
    config=None,
    universe=None,
):
    """
    Compose capped reporting and a sqrt(C)-approximation into a
    (1 + eps)-approximate colour counter.

    The sampled reporters are built by reporter_factory, or by
    reporter.restricted if it is None.

    Raises
    ------
    SuitabilityError
        If a refinement structure cannot be certified.
    """

    if reporter_factory is None:
        reporter_factory = reporter.restricted

    res = ReductionOne(
        setting,
        objects,
        reporter,
        approximator,
        reporter_factory,
        eps,
        config,
        universe,
    )

    return res


def query_reduction1(structure, q):
    return structure.query(q)


def verify_decision_sample(sample, verifier, eps, z, threshold, prob, size_slack=10.0):
    """
    Check that a colour sample is suitable for a decision structure.

    Every query with k <= (1 - eps) z must see fewer than threshold
    sampled colours and every query with k >= (1 + eps) z at least
    threshold of them.
    """

    if verifier.sampled_size(sample) > size_slack * verifier.n * prob:
        return False

    k = verifier.counts
    seen = verifier.sampled_counts(sample)

    low = k <= (1.0 - eps) * z
    high = k >= (1.0 + eps) * z

    res = bool(np.all(seen[low] < threshold) and np.all(seen[high] >= threshold))

    return res


class DecisionStructure(object):
    """
    Decides k >= z against k < z, and may err when k lies in
    [(1 - eps) z, (1 + eps) z].
    """

    def __init__(self, z, prob, sample, reporter, threshold, attempts):
        self.z = z
        self.prob = prob
        self.sample = sample
        self.reporter = reporter
        self.threshold = threshold
        self.cap = int(math.ceil(threshold))
        self.attempts = attempts

    def query(self, q):
        colors = self.reporter.report_colors(q, self.cap)

        if len(colors) >= self.threshold:
            return GE

        return LT

    def space_units(self):
        res = self.reporter.space_units() + len(self.sample)

        return res


def build_decision(
    setting, objects, reporter_factory, z, eps, config=None, verifier=None, seed=None
):
    """
    Build a decision structure at scale z.

    eps is clamped to 1/2. Colours are sampled with probability
    M = min(1, c1 eps^-2 ln(n) / z) and a query is GE iff at least z M
    sampled colours are present.

    Raises
    ------
    SuitabilityError
        If no sample is suitable within the attempt cap.
    """

    check_eps(eps)
    config = resolve(config)
    eps = min(eps, DECISION_EPS_MAX)

    if verifier is None:
        verifier = SampleVerifier(setting, objects)

    if seed is None:
        seed = config.seed

    floor_k = sampling_scale(len(objects), eps, config.c1)
    prob = min(1.0, floor_k / z)
    threshold = z * prob
    colors = range(verifier.num_colors)

    def is_suitable(sample):
        return verify_decision_sample(
            sample, verifier, eps, z, threshold, prob, config.size_slack
        )

    sample, attempts = draw_until_suitable(
        lambda s: sample_colors(colors, prob, s),
        is_suitable,
        seed,
        config.attempt_cap,
        "decision z={0:.1f}".format(z),
    )

    chosen = _sampled_objects(objects, sample)

    structure = DecisionStructure(
        z, prob, sample, reporter_factory(chosen), threshold, attempts
    )

    return structure


def query_decision(structure, q):
    return structure.query(q)


def decision_scales(n, eps, colors, c1):
    """
    The scales c1 eps^-2 ln(n) (1 + eps)^i for i = 1 .. W with
    W = ceil(log_{1 + eps}(colors)), at least 1.
    """

    base = sampling_scale(n, eps, c1)
    width = max(1, int(math.ceil(math.log(max(colors, 1)) / math.log(1.0 + eps))))

    res = [base * (1.0 + eps) ** i for i in range(1, width + 1)]

    return res


class ReductionTwo(object):
    """
    Approximate colour counting from capped colour reporting alone.

    Small counts are reported exactly. Otherwise a binary search over a
    ladder of decision structures finds an index i whose structure says
    GE while the next says LT, and z_i is returned. The scale below the
    first structure and the one above the last act as GE and LT. The
    answer lies within (1 +- 2 eps) k.

    Parameters
    ----------
    setting: str
        The geometric setting.
    objects: list
        The coloured objects.
    reporter: ColoredReporter
        Capped reporting over all objects.
    reporter_factory: func
        Builds the reporters of the sampled objects.
    eps: float
        The approximation parameter in (0, 1], clamped to 1/2.
    config: Config or None
        The constants.
    universe: QueryUniverse or None
        The queries the samples are certified against.
    """

    def __init__(
        self, setting, objects, reporter, reporter_factory, eps, config=None, universe=None
    ):
        check_eps(eps)

        self.config = resolve(config)
        self.eps = min(eps, DECISION_EPS_MAX)
        self.reporter = reporter
        self.n = len(objects)
        self.floor_k = sampling_scale(self.n, self.eps, self.config.c1)
        self.cap = int(math.floor(self.floor_k))

        verifier = SampleVerifier(setting, objects, universe)

        self.scales = decision_scales(
            self.n, self.eps, verifier.num_colors, self.config.c1
        )
        self.ladder = [
            build_decision(
                setting,
                objects,
                reporter_factory,
                z,
                self.eps,
                config=self.config,
                verifier=verifier,
                seed=self.config.seed + 1000 * (i + 1),
            )
            for i, z in enumerate(self.scales)
        ]

        log.info(
            "Reduction-II: n={0}, eps={1}, decisions={2}".format(
                self.n, self.eps, len(self.ladder)
            )
        )

    def crossover(self, q):
        """
        Binary search for an index whose structure says GE while the next
        says LT. Index 0 and W + 1 are the virtual GE and LT ends.
        """

        lo = 0
        hi = len(self.ladder) + 1

        while hi - lo > 1:
            mid = (lo + hi) // 2

            if self.ladder[mid - 1].query(q) == GE:
                lo = mid
            else:
                hi = mid

        return lo

    def query(self, q):
        colors = self.reporter.report_colors(q, self.cap)

        if len(colors) <= self.cap:
            return ApproxAnswer.exact(len(colors))

        index = self.crossover(q)
        value = self.floor_k if index == 0 else self.scales[index - 1]

        res = ApproxAnswer.epsapprox(value, 2.0 * self.eps)

        return res

    def space_units(self):
        res = self.reporter.space_units() + sum(d.space_units() for d in self.ladder)

        return res


def build_reduction2(
    setting, objects, reporter, eps, reporter_factory=None, config=None, universe=None
):
    """
    Compose capped reporting and a ladder of decision structures into an
    approximate colour counter.

    Raises
    ------
    SuitabilityError
        If a decision structure cannot be certified.
    """

    if reporter_factory is None:
        reporter_factory = reporter.restricted

    res = ReductionTwo(
        setting, objects, reporter, reporter_factory, eps, config, universe
    )

    return res


def query_reduction2(structure, q):
    return structure.query(q)
