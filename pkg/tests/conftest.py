import os
import sys

import pytest

# Ensure the project root is in the path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))


@pytest.fixture
def lossless_fiber():
    from mtb_designer.channel.models import FiberParams

    return FiberParams(beta2=-21.7, gamma=1.2, length_km=80.0)


@pytest.fixture
def dispersion_only_fiber():
    from mtb_designer.channel.models import FiberParams

    return FiberParams(beta2=-21.7, gamma=0.0, length_km=80.0)
