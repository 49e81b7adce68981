import sys

import numpy as np
import pytest

from nrdep.data import validate_dataset
from nrdep.neighborhood import compute_sigma
from nrdep.objective import ObjectiveState
from nrdep.optimizer import init_maps


def random_problem(seed, n=12, d=(4, 4), k=(2, 2), gamma=0.0):
    rng = np.random.default_rng(seed)
    data = validate_dataset([rng.standard_normal((n, dv)) for dv in d])
    sigmas = [compute_sigma(x) for x in data.views]
    maps = init_maps(data, k, sigmas, rng)
    return ObjectiveState(data, maps, sigmas, gamma=gamma)


@pytest.fixture
def problem_factory():
    return random_problem


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
