import numpy as np
import pytest

from tabsynth.data import Dataset
from tabsynth.statistical import MultivariateConfig, gen_multivariate


@pytest.fixture
def small_dataset():
    return Dataset(["a", "b", "c"], [[1.0, 2.0, 0.5], [2.0, 4.5, 0.1], [3.0, 5.0, 0.9], [4.0, 9.0, 0.3]])


@pytest.fixture(scope="session")
def correlated_source():
    """10^4 rows with Corr(TeamEngagement, Collaboration) = 0.8 by construction."""
    return gen_multivariate(MultivariateConfig(n=10_000, seed=2024))


@pytest.fixture(scope="session")
def gan_training_data():
    return gen_multivariate(MultivariateConfig(n=1000, seed=11))


def offdiag(m):
    m = np.asarray(m)
    return m[~np.eye(m.shape[0], dtype=bool)]
