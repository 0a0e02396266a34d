import math
import random

import pytest

from ote.cells import CROSSES, Cell
from ote.curves import dualize
from ote.cutting import (ConstructionFailure, Subdivision, build_cutting,
                         refine_cell, validate_cutting)
from ote.exact import dedupe_points, integer_shear


def _curves(pts):
    reps, _ = dedupe_points(pts)
    sheared, _ = integer_shear(reps)
    return [dualize(p, id=i) for i, p in enumerate(sheared)]


def _random_curves(rng, n, hi=500):
    return _curves([(rng.randint(0, hi), rng.randint(0, hi)) for _ in range(n)])


def test_tiny_input_is_single_root_leaf():
    h = build_cutting(_random_curves(random.Random(0), 3), r=4, t=3, seed=1)
    assert h.root.kind == "leaf"
    assert h.levels == [] and len(h.leaves) == 1
    assert h.max_depth == 0


def test_small_hierarchy_bounds_and_depth():
    curves = _random_curves(random.Random(2), 16)
    h = build_cutting(curves, r=2, t=4, seed=9)
    rep = validate_cutting(h)
    assert rep.ok, rep.problems
    by_depth = {lv["depth"]: lv for lv in rep.levels}
    assert by_depth[1]["max_crossing"] <= 8
    if 2 in by_depth:
        assert by_depth[2]["max_crossing"] <= 4
    assert h.max_depth <= math.ceil(math.log(16 / 4, 2)) + 2


def test_random_100_validates():
    curves = _random_curves(random.Random(3), 100, hi=10 ** 6)
    h = build_cutting(curves, r=4, t=10, seed=5)
    rep = validate_cutting(h)
    assert rep.ok, rep.problems[:3]


def _structure(h):
    out = []
    stack = [h.root]
    while stack:
        node = stack.pop()
        out.append((node.depth, node.kind, repr(node.cell), tuple(node.crossers),
                    tuple(node.sigs) if node.sigs else None))
        if node.children:
            stack.extend(node.children)
    return out


def test_build_is_deterministic():
    rng = random.Random(4)
    pts = [(rng.randint(0, 300), rng.randint(0, 300)) for _ in range(30)]
    h1 = build_cutting(_curves(pts), r=4, t=3, seed=77)
    h2 = build_cutting(_curves(pts), r=4, t=3, seed=77)
    assert _structure(h1) == _structure(h2)


def test_different_seed_changes_sampling():
    rng = random.Random(4)
    pts = [(rng.randint(0, 300), rng.randint(0, 300)) for _ in range(30)]
    h1 = build_cutting(_curves(pts), r=4, t=3, seed=77)
    h2 = build_cutting(_curves(pts), r=4, t=3, seed=78)
    # not a contract, but the sample should almost surely differ
    assert _structure(h1) != _structure(h2)


def test_validator_reports_injected_fault():
    curves = _random_curves(random.Random(6), 20)
    h = build_cutting(curves, r=2, t=4, seed=1)
    victim = h.levels[0][0].children[0]
    while not victim.crossers:
        victim = next(c for c in h.levels[0][0].children if c.crossers)
    victim.crossers = victim.crossers[1:]
    rep = validate_cutting(h, check_pairs=False)
    assert not rep.ok
    assert any("missing curve" in p for p in rep.problems)


def test_refine_cell_bound_and_determinism():
    curves = _random_curves(random.Random(8), 8)
    root = Cell.trap(None, None, None, None)
    sub1 = refine_cell(root, curves, r=2, seed=3, threshold=4)
    sub2 = refine_cell(root, curves, r=2, seed=3, threshold=4)
    assert all(len(sc.crossers) <= 4 for sc in sub1.subcells)
    assert ([repr(sc.cell) for sc in sub1.subcells]
            == [repr(sc.cell) for sc in sub2.subcells])
    assert [sc.entries for sc in sub1.subcells] == \
        [sc.entries for sc in sub2.subcells]


def test_refine_with_full_sample_has_no_crossings():
    curves = _random_curves(random.Random(9), 4)
    root = Cell.trap(None, None, None, None)
    sub = Subdivision(root, curves, curves)
    assert all(not sc.crossers for sc in sub.subcells)


def test_grid_and_collinear_validate():
    for pts in ([(i, j) for i in range(4) for j in range(4)],
                [(i, 3 * i + 1) for i in range(10)]):
        h = build_cutting(_curves(pts), r=4, t=3, seed=2)
        rep = validate_cutting(h)
        assert rep.ok, rep.problems[:3]


def test_parameter_validation():
    curves = _random_curves(random.Random(1), 5)
    with pytest.raises(ValueError):
        build_cutting(curves, r=1, t=3, seed=0)
    with pytest.raises(ValueError):
        build_cutting(curves, r=4, t=2, seed=0)
