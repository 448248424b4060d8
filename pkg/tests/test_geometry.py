import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from thermagrid.geometry import (Box3, Point3, contains, contains_many, euclidean_distance,
                                 manhattan_distance, manhattan_many)

coord = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
points = st.builds(Point3, coord, coord, coord)


@pytest.mark.parametrize("a, b, expected", [
    ((0, 0, 0), (1, 0, 0), 1.0),
    ((0, 0, 0), (0, 0, 0), 0.0),
    ((0, 0, 0), (1, 2, 2), 3.0),
])
def test_euclidean(a, b, expected):
    assert euclidean_distance(Point3(*a), Point3(*b)) == expected


@pytest.mark.parametrize("a, b, expected", [
    ((0, 0, 0), (1, 0, 0), 1.0),
    ((0, 0, 0), (1, 2, 2), 5.0),
    ((3, 3, 3), (3, 3, 3), 0.0),
])
def test_manhattan(a, b, expected):
    assert manhattan_distance(Point3(*a), Point3(*b)) == expected


@pytest.mark.parametrize("p, inside", [
    ((0.5, 0.5, 0.5), True),
    ((1.0, 1.0, 1.0), True),
    ((0.0, 0.0, 0.0), True),
    ((1.5, 0.0, 0.0), False),
    ((0.5, -1e-12, 0.5), False),
])
def test_contains_closed(p, inside):
    unit = Box3.from_dims(1, 1, 1)
    assert contains(unit, Point3(*p)) is inside
    assert bool(contains_many(unit, np.array([p]))[0]) is inside


def test_invalid_values():
    with pytest.raises(ValueError):
        Point3(math.nan, 0, 0)
    with pytest.raises(ValueError):
        Box3.from_dims(1, 0, 1)
    with pytest.raises(ValueError):
        Box3.from_dims(1, 1, 1).inset(0.5)


@given(points, points, points)
def test_triangle_inequality(a, b, c):
    for dist in (euclidean_distance, manhattan_distance):
        assert dist(a, c) <= dist(a, b) + dist(b, c) + 1e-9


@given(points, points)
def test_metric_order_and_symmetry(a, b):
    e, m = euclidean_distance(a, b), manhattan_distance(a, b)
    assert e == euclidean_distance(b, a)
    assert m == manhattan_distance(b, a)
    assert m >= e * (1 - 1e-15)
    assert (m == 0) == (a == b)
    if m > 1e-150:  # squares of smaller deltas underflow
        assert e > 0


@given(points, st.lists(points, min_size=1, max_size=10))
def test_manhattan_many_matches_scalar(p, qs):
    arr = np.array([tuple(q) for q in qs])
    assert manhattan_many(p.as_array(), arr).tolist() == [manhattan_distance(p, q) for q in qs]
