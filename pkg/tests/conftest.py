import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from ambilogic.cli import open_model

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

settings.register_profile(
    "repo", deadline=None, derandomize=True, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

FIXTURES = HERE / "fixtures"


@pytest.fixture
def atd():
    return open_model("atd")


@pytest.fixture
def ex2():
    return open_model("example2")


@pytest.fixture
def critical():
    return open_model("critical")


@pytest.fixture
def no_equiv():
    return open_model("no_equiv")
