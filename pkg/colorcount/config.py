#
#   Configuration of the counting structures.
#

import copy
import os

import numpy as np

from colorcount.errors import BadParamsError

# environment variable that overrides the suitability attempt cap
ATTEMPT_CAP_ENV = "CRC_ATTEMPT_CAP"

DEFAULTS = {
    "c1": 2.0,
    "attempt_cap": 64,
    "leaf_size": 16,
    "sampler_c": 4.0,
    "delta": None,
    "bucket_size": None,
    "shared_table_min_n": 16,
    "size_slack": 10.0,
    "seed": 42,
}


class Config(object):
    """
    Tunable constants of the counting structures.

    Parameters
    ----------
    c1: float
        The sampling constant. Sampling probabilities are
        min(1, c1 * eps^-2 * ln(n) / z).
    attempt_cap: int
        The number of random samples drawn before a build gives up.
    leaf_size: int
        Recursion-tree nodes with fewer rectangles are leaves.
    sampler_c: float
        The constant C in the exact-path threshold of the sampled stabber.
    delta: int or None
        The inverse sampling rate of the sampled stabber. None means
        ceil(log2(log2(n))), at least 2.
    bucket_size: int or None
        The number of points per bucket of the bucketed approximator.
        None means ceil(log2(n)^2), at least 4.
    shared_table_min_n: int
        Below this input size the shared table is replaced by scanning.
    size_slack: float
        A colour sample R is rejected if it holds more than
        size_slack * n * M objects.
    seed: int
        The seed of the first sample; every further attempt advances it.
    """

    def __init__(self, **kwargs):
        for key in kwargs:
            if key not in DEFAULTS:
                raise BadParamsError("Unknown configuration key: {0}".format(key))

        for key, value in DEFAULTS.items():
            setattr(self, key, kwargs.get(key, value))

        self.validate()

    def validate(self):
        """
        Sanity check the constants.

        Raises
        ------
        BadParamsError
            If a constant is out of range.
        """

        for key in ["c1", "sampler_c", "size_slack"]:
            if not getattr(self, key) > 0:
                raise BadParamsError(
                    "{0} must be positive: {1}".format(key, getattr(self, key))
                )

        for key in ["attempt_cap", "leaf_size", "shared_table_min_n"]:
            value = getattr(self, key)
            if int(value) != value or value < 1:
                raise BadParamsError(
                    "{0} must be a positive integer: {1}".format(key, value)
                )

        if self.delta is not None and (int(self.delta) != self.delta or self.delta < 1):
            raise BadParamsError("delta must be a positive integer: {0}".format(self.delta))

        if self.bucket_size is not None and (
            int(self.bucket_size) != self.bucket_size or self.bucket_size < 1
        ):
            raise BadParamsError(
                "bucket_size must be a positive integer: {0}".format(self.bucket_size)
            )

    def copy(self, **kwargs):
        """
        Return a copy with some constants replaced.
        """

        params = {key: getattr(self, key) for key in DEFAULTS}

        for key in kwargs:
            if key not in DEFAULTS:
                raise BadParamsError("Unknown configuration key: {0}".format(key))

        params.update(kwargs)

        return Config(**params)

    def __repr__(self):
        items = ", ".join(
            "{0}={1!r}".format(key, getattr(self, key)) for key in DEFAULTS
        )
        return "Config({0})".format(items)


def get_default_config():
    """
    Get the default configuration, honouring the environment.

    Returns
    -------
    config: Config
        The default constants, with the attempt cap taken from
        CRC_ATTEMPT_CAP if it is set.

    Raises
    ------
    BadParamsError
        If CRC_ATTEMPT_CAP is not a positive integer.
    """

    raw = os.environ.get(ATTEMPT_CAP_ENV)

    if raw is None:
        return Config()

    try:
        cap = int(raw)
    except ValueError:
        raise BadParamsError(
            "{0} is not an integer: {1}".format(ATTEMPT_CAP_ENV, raw)
        )

    if cap < 1:
        raise BadParamsError("{0} must be positive: {1}".format(ATTEMPT_CAP_ENV, raw))

    res = Config(attempt_cap=cap)

    return res


def resolve(config):
    """
    Return the configuration to use for a build.
    """

    if config is None:
        return get_default_config()

    return copy.copy(config)


def check_eps(eps):
    """
    Check that an approximation parameter lies in (0, 1].

    Raises
    ------
    BadParamsError
        If it does not.
    """

    if not (0 < eps <= 1):
        raise BadParamsError("eps must lie in (0, 1]: {0}".format(eps))


def log_n(n):
    """
    The natural logarithm of the input size, at least ln(2).
    """

    return float(np.log(max(n, 2)))


def sampling_scale(n, eps, c1):
    """
    The count scale c1 * eps^-2 * ln(n) below which nothing is sampled.
    """

    res = c1 * eps ** (-2) * log_n(n)

    return res
