import math
import random
from itertools import combinations

from hypothesis import given, strategies as st

from ote.exact import (
    NEGATIVE, POSITIVE, ZERO, dedupe_points, integer_shear, orient, rat,
    scale_to_integers, shear_normalize,
)

coord = st.integers(min_value=-1000, max_value=1000)
point = st.tuples(coord, coord)


def test_orient_examples():
    assert orient((0, 0), (1, 0), (0, 1)) == POSITIVE
    assert orient((0, 0), (1, 1), (2, 2)) == ZERO
    assert orient((0, 0), (0, 1), (1, 0)) == NEGATIVE


@given(point, point, point)
def test_orient_sign_algebra(p, q, r):
    o = orient(p, q, r)
    assert orient(q, r, p) == o
    assert orient(r, p, q) == o
    assert orient(q, p, r) == -o
    assert orient(p, r, q) == -o


def test_orient_exactness_large():
    # far beyond float precision
    big = 10 ** 40
    assert orient((0, 0), (big, 1), (2 * big, 2)) == ZERO
    assert orient((0, 0), (big, 1), (2 * big, 3)) == POSITIVE


def test_rat_lowest_terms():
    v = rat(6, -4)
    assert v.numerator == -3 and v.denominator == 2


def test_shear_separates_vertical_pair():
    pts, eps = shear_normalize([(0, 0), (0, 1), (1, 0)])
    assert 0 < eps < 1
    assert len({p[0] for p in pts}) == 3


def test_shear_preserves_x_order_when_distinct():
    pts = [(0, 5), (3, -2), (7, 9)]
    sheared, _ = shear_normalize(pts)
    assert [p[0] for p in pts] == sorted(p[0] for p in pts)
    assert [s[0] for s in sheared] == sorted(s[0] for s in sheared)


def test_shear_keeps_duplicates_identical():
    sheared, _ = shear_normalize([(0, 0), (0, 0), (1, 1)])
    assert sheared[0] == sheared[1]


def test_shear_preserves_orientation_brute_force():
    rng = random.Random(7)
    for _ in range(30):
        pts = [(rng.randint(-8, 8), rng.randint(-8, 8)) for _ in range(12)]
        sheared, _ = shear_normalize(pts)
        for i, j, k in combinations(range(len(pts)), 3):
            assert orient(pts[i], pts[j], pts[k]) == \
                orient(sheared[i], sheared[j], sheared[k])


def test_integer_shear_matches_shear_normalize_orientation():
    rng = random.Random(11)
    for _ in range(20):
        pts = [(rng.randint(-9, 9), rng.randint(-9, 9)) for _ in range(10)]
        sheared, m = integer_shear(pts)
        rats, _ = shear_normalize(pts)
        for i, j, k in combinations(range(10), 3):
            assert orient(pts[i], pts[j], pts[k]) == \
                orient(sheared[i], sheared[j], sheared[k])
        # x-order agrees with the rational shear
        order_int = sorted(range(10), key=lambda i: (sheared[i][0], i))
        order_rat = sorted(range(10), key=lambda i: (rats[i][0], i))
        assert order_int == order_rat


def test_scale_to_integers():
    pts = [(rat(1, 2), rat(1, 3)), (rat(3, 4), 2)]
    ints = scale_to_integers(pts)
    assert ints == [(2, 1), (3, 6)]
    assert orient(*pts, (0, 0)) == orient(*ints, (0, 0))


def test_dedupe_points():
    reps, idx = dedupe_points([(0, 0), (1, 1), (0, 0)])
    assert reps == [(0, 0), (1, 1)]
    assert idx == [0, 1, 0]
