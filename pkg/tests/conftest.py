import numpy as np
import pytest

from rankmetrics import EnsembleConfig, build_world, generate_ensemble

WORLD600_CONFIG = EnsembleConfig(
    mu_start=4.0, mu_end=2.0, mu_count=200, sizes=(800, 400, 200), seed=0
)


@pytest.fixture(scope="session")
def world600():
    """The 600-series study grid at seed 0, with its world index."""
    ensemble = generate_ensemble(WORLD600_CONFIG)
    world = build_world(list(ensemble.series))
    return ensemble, world


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
