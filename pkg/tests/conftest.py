"""Shared fields, characters and tori."""

import pytest

from bd_cover.core.etale import make_etale
from bd_cover.core.localfield import AdditiveCharacter, make_field


@pytest.fixture
def q3():
    return make_field(3)


@pytest.fixture
def q5():
    return make_field(5)


@pytest.fixture
def q7():
    return make_field(7)


@pytest.fixture
def psi3(q3):
    return AdditiveCharacter(q3, 0)


@pytest.fixture
def psi5(q5):
    return AdditiveCharacter(q5, 0)


@pytest.fixture
def ramified3(q3):
    """Q_3(sqrt 3) as an etale algebra."""
    return make_etale(q3, 3)
