import random
from itertools import combinations

from ote.cells import (ABOVE, BELOW, CONTAINS, CROSSES, Cell, classify,
                       probe_x, walk_sections)
from ote.curves import Curve, crossing, dualize, side_of
from ote.cutting import Subdivision
from ote.exact import dedupe_points, integer_shear, rat


def _curves(pts):
    reps, _ = dedupe_points(pts)
    sheared, _ = integer_shear(reps)
    return [dualize(p, id=i) for i, p in enumerate(sheared)]


def _random_curves(rng, n, lo=0, hi=200):
    return _curves([(rng.randint(lo, hi), rng.randint(lo, hi))
                    for _ in range(n)])


def test_root_cell_is_crossed_by_everything():
    root = Cell.trap(None, None, None, None)
    for c in _random_curves(random.Random(0), 10):
        code, hits = classify(root, c)
        assert code == CROSSES
        assert [h[0] for h in hits] == ["L", "R"]


def test_separated_line_is_above():
    # trap over x in (0,1) between y=0 and y=x+2; slopes pairwise distinct
    tr = Cell.trap(0, 1, Curve.line(0, 0, id=0), Curve.line(1, -2, id=1))
    assert classify(tr, Curve.line(2, -4, id=2))[0] == ABOVE   # y = 2x+4
    assert classify(tr, Curve.line(2, 10, id=3))[0] == BELOW   # y = 2x-10


def test_boundary_curve_codes():
    top = Curve.line(0, -1, id=1)
    tr = Cell.trap(0, 1, Curve.line(0, 0, id=0), top)
    assert classify(tr, top)[0] == ABOVE
    edge = Cell.edge(top, 0, 1)
    assert classify(edge, top)[0] == CONTAINS


def test_three_concurrent_curves_share_wall_position():
    # y=0, y=x, y=-x all pass through the origin on the wall x=0
    wall = Cell.wall(0, -5, 5)
    cs = [Curve.line(0, 0, id=0), Curve.line(1, 0, id=1), Curve.line(-1, 0, id=2)]
    for c in cs:
        code, hits = classify(wall, c)
        assert code == CROSSES
        assert hits == [("pt", (0, 0))]


def _subdivision(rng, n, dn):
    curves = _random_curves(rng, n)
    root = Cell.trap(None, None, None, None)
    d = sorted(rng.sample(curves, min(dn, len(curves))), key=lambda c: c.id)
    return Subdivision(root, d, curves), curves


def test_fast_path_matches_generic_classifier():
    rng = random.Random(21)
    for trial in range(6):
        sub, curves = _subdivision(rng, 14, 4)
        for sc in sub.subcells:
            for c in curves:
                want, _ = classify(sc.cell, c)
                got = sc.entries[c.id][0]
                assert got == want, (trial, sc.cell, c.id, got, want)


def test_alternation_criterion():
    # two curves cross inside a full-dimensional cell iff their boundary
    # hits alternate in the cyclic permutation
    rng = random.Random(33)
    pairs_in = pairs_out = 0
    for trial in range(5):
        sub, curves = _subdivision(rng, 12, 4)
        by_id = {c.id: c for c in curves}
        for sc in sub.subcells:
            if sc.cell.kind != "trap" or len(sc.crossers) < 2:
                continue
            for g1, g2 in combinations(sc.crossers, 2):
                e1 = sc.entries[g1]
                e2 = sc.entries[g2]
                i1, i2 = sorted(e1[2:])
                j1, j2 = e2[2:]
                distinct = len({i1, i2, j1, j2}) == 4
                alternate = distinct and ((i1 < j1 < i2) != (i1 < j2 < i2))
                q = crossing(by_id[g1], by_id[g2])
                inside = sc.cell.contains_point(q)
                assert alternate == inside, (sc.cell, g1, g2)
                pairs_in += inside
                pairs_out += not inside
    assert pairs_in > 20 and pairs_out > 20


def test_classify_consistent_with_side_of():
    rng = random.Random(44)
    sub, curves = _subdivision(rng, 10, 3)
    for sc in sub.subcells:
        if sc.cell.kind != "trap":
            continue
        cell = sc.cell
        px = probe_x(cell.x_lo, cell.x_hi)
        lo = cell.bot.y_at(px) if cell.bot is not None else rat(-10 ** 9)
        hi = cell.top.y_at(px) if cell.top is not None else rat(10 ** 9)
        mid = (lo + hi) / 2
        for c in curves:
            # "above" = the curve lies above the cell, so interior points
            # sit below the curve
            code = sc.entries[c.id][0]
            if code == ABOVE:
                assert side_of(c, (px, mid)) == -1
            elif code == BELOW:
                assert side_of(c, (px, mid)) == 1


def test_walk_positions_are_merged_for_concurrent_hits():
    # two curves through one boundary point of a trapezoid share a position
    tr = Cell.trap(-1, 1, Curve.line(0, 1, id=90), Curve.line(0, -1, id=91))
    hits = []
    for c in (Curve.line(1, 1, id=0), Curve.line(2, 2, id=1)):
        code, hh = classify(tr, c)
        assert code == CROSSES
        for h in hh:
            hits.append((h, c.id))
    positions = walk_sections(tr, hits)
    shared = [p for _, p in positions if len(p) == 2]
    assert shared == [[0, 1]]  # both enter through (1, 0) on the right wall
