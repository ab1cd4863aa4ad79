import pytest

from bochvar.algebra_core import builtin
from bochvar.plonka import enumerate_bca


@pytest.fixture(scope="session")
def wke():
    return builtin("wke")


@pytest.fixture(scope="session")
def b2():
    return builtin("b2")


@pytest.fixture(scope="session")
def b4():
    return builtin("b4")


@pytest.fixture(scope="session")
def b4b2():
    return builtin("b4+b2")


@pytest.fixture(scope="session")
def enumerated():
    """One representative per Bochvar algebra with at most 8 elements."""
    return enumerate_bca(8, workers=2)
