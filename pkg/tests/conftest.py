import pytest

from fuchsian_codes.fuchsian import load_preset


@pytest.fixture(scope="session")
def e2d1():
    return load_preset("e2d1D6ii")


@pytest.fixture(scope="session")
def gamma61():
    return load_preset("gamma61")
