# tests/conftest.py
from fractions import Fraction

import pytest

from services.geometry_core import Point, SimplePolygon
from services.polygon_io import load_corpus

F = Fraction


def P(*coords) -> SimplePolygon:
    """P((0, 0), (1, 0), ...) 的簡寫；座標可用 int、Fraction 或 "1/3" 字串。"""
    return SimplePolygon.from_points(Point.of(x, y) for x, y in coords)


def pt(x, y) -> Point:
    return Point.of(x, y)


@pytest.fixture
def square():
    return P((0, 0), (1, 0), (1, 1), (0, 1))


@pytest.fixture
def lshape():
    return P((0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2))


@pytest.fixture
def triangle():
    return P((0, 0), (6, 0), (0, 6))


@pytest.fixture
def pentagon():
    return load_corpus("pentagon")


@pytest.fixture
def comb3():
    return load_corpus("comb3")
