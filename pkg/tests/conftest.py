"""Shared pytest fixtures."""
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from nets import complete_k5, pocket_net, three_collinear  # noqa: E402


@pytest.fixture(scope="session")
def net3():
    return three_collinear()


@pytest.fixture(scope="session")
def k5():
    return complete_k5()


@pytest.fixture(scope="session")
def pocket():
    return pocket_net()
