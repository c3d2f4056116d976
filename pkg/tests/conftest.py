import pytest

# master seed shared by the acceptance suite and the heavier unit tests
ACCEPT_SEED = 20070101


@pytest.fixture(scope="session")
def accept_seed():
    return ACCEPT_SEED
