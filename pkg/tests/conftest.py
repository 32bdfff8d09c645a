from pathlib import Path

import pytest


@pytest.fixture(scope="session")
def fixture_dir():
    return Path(__file__).parent / "fixtures"
