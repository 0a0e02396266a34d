import random
from itertools import combinations

import pytest

from ote.curves import (
    Curve, MalformedPolyline, all_crossings, crossing, dualize, side_of,
    validate_arrangement,
)
from ote.exact import orient, rat, sign, shear_normalize


def test_line_crossing_examples():
    assert crossing(Curve.line(0, 0), Curve.line(1, 0)) == (0, 0)
    assert crossing(Curve.line(2, 3), Curve.line(0, 0)) == (rat(3, 2), 0)


def test_side_of_examples():
    assert side_of(Curve.line(0, 0), (5, 1)) == 1
    assert side_of(Curve.line(1, 0), (2, 2)) == 0
    assert side_of(Curve.line(2, 3), (0, -4)) == -1


def test_dualize_examples():
    assert dualize((0, 0)).y_at(7) == 0
    c = dualize((2, 3))
    assert c.y_at(0) == -3 and c.y_at(2) == 1


def test_duality_sign_translation_rule():
    # orient(a,b,c) == side_of(dual(c), dual(a) x dual(b)) * sign(x_b - x_a)
    rng = random.Random(3)
    checked = 0
    while checked < 100:
        pts = [(rng.randint(-30, 30), rng.randint(-30, 30)) for _ in range(3)]
        if len({p for p in pts}) < 3:
            continue
        sheared, _ = shear_normalize(pts)
        a, b, c = sheared
        la, lb, lc = (dualize(p) for p in sheared)
        q = crossing(la, lb)
        got = side_of(lc, q) * sign(b[0] - a[0])
        assert got == orient(*pts)
        checked += 1


def _wire_polylines():
    # two wires swapping once between x=0 and x=1
    top = Curve.polyline([0, 1], [1, 0], id=0)
    bot = Curve.polyline([0, 1], [0, 1], id=1)
    return top, bot


def test_polyline_crossing_inside_step():
    top, bot = _wire_polylines()
    q = crossing(top, bot)
    assert 0 < q[0] < 1
    assert q == (rat(1, 2), rat(1, 2))
    # independent check: both ends of the step bracket the crossing
    assert sign(top.y_at(0) - bot.y_at(0)) == 1
    assert sign(top.y_at(1) - bot.y_at(1)) == -1


def test_polyline_end_rays_are_horizontal():
    top, _ = _wire_polylines()
    assert top.y_at(-100) == 1
    assert top.y_at(100) == 0


def test_validate_rejects_double_crossing():
    zig = Curve.polyline([0, 1, 2], [0, 2, 0], id=0)
    flat = Curve.polyline([0, 2], [1, 1], id=1)
    assert len(all_crossings(zig, flat)) == 2
    with pytest.raises(MalformedPolyline):
        validate_arrangement([zig, flat])


def test_validate_rejects_equal_slopes():
    with pytest.raises(MalformedPolyline):
        validate_arrangement([Curve.line(1, 0, id=0), Curve.line(1, 5, id=1)])


def test_line_vs_polyline_crossing():
    line = Curve.line(1, 0)          # y = x
    wire = Curve.polyline([0, 1], [3, 2])
    q = crossing(line, wire)
    assert q[1] == line.y_at(q[0])
    assert q[1] == wire.y_at(q[0])


def test_crossing_exactly_at_breakpoint():
    line = Curve.line(0, -1)          # y = 1
    wire = Curve.polyline([0, 1, 2], [0, 1, 3])
    q = crossing(line, wire)
    assert q == (1, 1)


def test_touch_without_crossing_rejected():
    line = Curve.line(0, -1)          # y = 1, tangent to the apex
    wire = Curve.polyline([0, 1, 2], [0, 1, 0])
    with pytest.raises(MalformedPolyline):
        all_crossings(line, wire)
