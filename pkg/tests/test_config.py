import numpy as np
import pytest

import colorcount.config as config
from colorcount.errors import BadParamsError


def test_defaults():
    """
    Check the default constants and the copy semantics.
    """

    cfg = config.Config()

    assert cfg.c1 == 2.0
    assert cfg.attempt_cap == 64
    assert cfg.delta is None

    other = cfg.copy(seed=7, c1=1.0)

    assert other.seed == 7
    assert other.c1 == 1.0
    assert cfg.seed == 42
    assert "seed=7" in repr(other)


def test_validation():
    """
    Unknown keys and out of range constants are rejected.
    """

    for kwargs in [
        {"colour": 1},
        {"c1": 0},
        {"sampler_c": -1.0},
        {"attempt_cap": 0},
        {"leaf_size": 2.5},
        {"delta": 0},
        {"bucket_size": 0},
    ]:
        with pytest.raises(BadParamsError):
            config.Config(**kwargs)

    with pytest.raises(BadParamsError):
        config.Config().copy(nonsense=3)


def test_attempt_cap_from_environment(monkeypatch):
    """
    The attempt cap is taken from the environment if it is set.
    """

    monkeypatch.delenv(config.ATTEMPT_CAP_ENV, raising=False)
    assert config.get_default_config().attempt_cap == 64

    monkeypatch.setenv(config.ATTEMPT_CAP_ENV, "3")
    assert config.get_default_config().attempt_cap == 3
    assert config.resolve(None).attempt_cap == 3

    for raw in ["zero", "0", "-2"]:
        monkeypatch.setenv(config.ATTEMPT_CAP_ENV, raw)

        with pytest.raises(BadParamsError):
            config.get_default_config()


def test_check_eps():
    """
    eps must lie in (0, 1].
    """

    for eps in [0.01, 0.5, 1.0]:
        config.check_eps(eps)

    for eps in [0.0, -0.5, 1.01]:
        with pytest.raises(BadParamsError):
            config.check_eps(eps)


def test_sampling_scale():
    """
    Check c1 eps^-2 ln(n), with ln(n) at least ln(2).
    """

    assert np.isclose(config.sampling_scale(100, 0.5, 2.0), 8.0 * np.log(100))
    assert np.isclose(config.sampling_scale(1, 1.0, 1.0), np.log(2))
    assert np.isclose(config.log_n(0), np.log(2))


if __name__ == "__main__":
    import pytest

    pytest.main([__file__])
