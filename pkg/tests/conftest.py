import pytest

from symlab import build_symbol, build_system, critical_structure

# The two desk symbols used throughout: the scaled Chebyshev case p=1
# (finite cut [-1, 1], everything closed form) and the cubic case p=2
# with integer critical data (x = (-2, -1, 3)).


@pytest.fixture(scope="session")
def cheb():
    return build_symbol(1, (0.0, 0.25))


@pytest.fixture(scope="session")
def can():
    return build_symbol(2, (0.0, 7.0, 3.0))


@pytest.fixture(scope="session")
def cheb_struct(cheb):
    return critical_structure(cheb)


@pytest.fixture(scope="session")
def can_struct(can):
    return critical_structure(can)


@pytest.fixture(scope="session")
def can_sys(can):
    # building the chain runs the sigma quadratures once; share it
    return build_system(can)


@pytest.fixture(scope="session")
def cheb_sys(cheb):
    return build_system(cheb)
