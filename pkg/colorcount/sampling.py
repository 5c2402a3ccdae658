#
#   Seeded random sampling and the retry loop for suitable samples.
#

import logging

import numpy as np

from colorcount.errors import BadParamsError, SuitabilityError

log = logging.getLogger(__name__)


def make_rng(seed):
    """
    Get a seeded random number generator.
    """

    return np.random.default_rng(seed)


def bernoulli_mask(size, prob, rng):
    """
    Pick each of size items independently with probability prob.

    Parameters
    ----------
    size: int
        The number of items.
    prob: float
        The inclusion probability in (0, 1].
    rng: ~numpy.random.Generator
        The random number generator.

    Returns
    -------
    mask: ~np.ndarray of bool
        The inclusion flags.
    """

    if prob >= 1.0:
        return np.ones(size, dtype=bool)

    mask = rng.random(size) < prob

    return mask


def sample_colors(colors, prob, seed):
    """
    Sample colours independently with probability prob.

    Parameters
    ----------
    colors: iterable of int
        The colour ids. Duplicates are ignored.
    prob: float
        The inclusion probability in (0, 1].
    seed: int
        The seed of the random number generator.

    Returns
    -------
    sample: list of int
        The sampled colour ids in ascending order.

    Raises
    ------
    BadParamsError
        If prob is outside (0, 1].
    """

    if not (0 < prob <= 1):
        raise BadParamsError("Sampling probability out of range: {0}".format(prob))

    colors = np.array(sorted(set(colors)), dtype=int)
    rng = make_rng(seed)
    mask = bernoulli_mask(len(colors), prob, rng)

    sample = colors[mask].tolist()

    return sample


def draw_until_suitable(draw, is_suitable, seed, attempt_cap, label):
    """
    Draw random samples until one passes verification.

    Parameters
    ----------
    draw: func
        Called with a seed, returns a candidate sample.
    is_suitable: func
        Called with a candidate, returns True if it is suitable.
    seed: int
        The seed of the first attempt. Attempt i uses seed + i.
    attempt_cap: int
        The maximum number of attempts.
    label: str
        A name for the log and error messages.

    Returns
    -------
    candidate: object
        The first suitable sample.
    attempts: int
        The number of attempts used.

    Raises
    ------
    SuitabilityError
        If no candidate passes within the attempt cap.
    """

    for attempt in range(attempt_cap):
        candidate = draw(seed + attempt)

        if is_suitable(candidate):
            log.debug("{0}: sample accepted after {1} attempts".format(label, attempt + 1))
            return candidate, attempt + 1

        log.debug("{0}: sample {1} rejected".format(label, attempt + 1))

    raise SuitabilityError(
        "{0}: no suitable sample within {1} attempts".format(label, attempt_cap),
        attempt_cap,
    )
