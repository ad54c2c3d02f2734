import warnings
from importlib import resources

import numpy as np
import pytest

from rgb1iwei import inference
from rgb1iwei.distribution import SubModel


@pytest.fixture(scope="session")
def guinea():
    path = resources.files("rgb1iwei") / "data" / "guinea_pigs.txt"
    with resources.as_file(path) as fp:
        values = np.loadtxt(fp)
    return inference.Dataset(values / 1000.0, label="guinea pigs",
                             scale_note="days / 1000")


@pytest.fixture(scope="session")
def iwei_fit(guinea):
    return inference.fit(guinea, SubModel.IWEI)


@pytest.fixture(scope="session")
def full_fit(guinea):
    """Full-model fit plus whatever warnings it raised."""
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        result = inference.fit(guinea, SubModel.FULL)
    return result, list(rec)


@pytest.fixture(scope="session")
def beta_fit(guinea):
    return inference.fit(guinea, SubModel.BETA_IWEI)


@pytest.fixture(scope="session")
def expgen_fit(guinea):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return inference.fit(guinea, SubModel.EXPGEN_IWEI)
