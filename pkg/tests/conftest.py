from pathlib import Path

import numpy as np
import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture
def rng():
    return np.random.default_rng(20130814)


@pytest.fixture(scope="session")
def teapot_path() -> Path:
    return REPO_ROOT / "data" / "teapot.newell"
