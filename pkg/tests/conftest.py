from fractions import Fraction

import pytest

from bgwtilt.dist import IntSet, Pmf, uniform
from bgwtilt.family import SetFamily

F4 = Fraction(1, 4)


@pytest.fixture
def u4():
    return uniform(range(4))


@pytest.fixture
def fam_0_23(u4):
    """Uniform on {0,1,2,3} with A_1 = {0}, A_2 = {2,3} and A_0 = {1}."""
    return SetFamily(u4, [[0], [2, 3]])


@pytest.fixture
def crit_binary():
    """p(0) = p(2) = 1/4, p(1) = 1/2."""
    return Pmf({0: F4, 1: Fraction(1, 2), 2: F4})


@pytest.fixture
def nonmono():
    """p(0) = p(4) = 1/4, p(2) = 1/2 with A_1 = {0, 4} and A_0 = {2}."""
    p = Pmf({0: F4, 2: Fraction(1, 2), 4: F4})
    return SetFamily(p, [[0, 4]])


def tail_pmf():
    """p(0) = 0.72, p(2) = 0.08 and 1.2 * 0.5**k on 3 + 2N."""
    return Pmf({0: 0.72, 2: 0.08}, [(3, 2, 1.2, 0.5)], mode="float")


__all__ = ["IntSet", "tail_pmf"]
