import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

FIGURE_ALPHA = complex(-13.89, 8.23)


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)
