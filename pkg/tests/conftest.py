from fractions import Fraction

import pytest

from multiferm import symgen as sg
from multiferm.core import Sector


@pytest.fixture(scope="session")
def real15():
    return sg.real_space(Fraction(15, 2))


@pytest.fixture(scope="session")
def ramond8():
    return sg.real_space(8, Sector.RAMOND)


@pytest.fixture(scope="session")
def complex15():
    return sg.complex_space(Fraction(15, 2))


@pytest.fixture(scope="session")
def complex7():
    return sg.complex_space(Fraction(7, 2))
