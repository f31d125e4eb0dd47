import pytest
from hypothesis import settings

from ahgraph.graph import ads_schwarzschild

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


@pytest.fixture(scope="session")
def ads3():
    return ads_schwarzschild(3, 0.5)
