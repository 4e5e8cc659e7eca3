import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

JOBS_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "jobs")


@pytest.fixture
def rng():
    return np.random.default_rng(20240801)


@pytest.fixture
def jobs_dir():
    return os.path.abspath(JOBS_DIR)
