import warnings

import numpy as np
import pytest

from liereduce import load_config, se2


def quiet_config(name, **overrides):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        return load_config(name).with_overrides(**overrides)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def paper_cfg():
    return quiet_config("paper-unicycles")


@pytest.fixture(scope="session")
def unicycles_cfg():
    return quiet_config("unicycles")


def random_pose(rng, spread=2.0):
    return se2.from_pose(*rng.uniform(-spread, spread, 2), rng.uniform(-np.pi, np.pi))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
