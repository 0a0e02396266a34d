"""Cells of a vertical decomposition and exact cell/curve classification.

Cell kinds:
  trap   -- open pseudo-trapezoid {x in (x_lo, x_hi), bot(x) < y < top(x)};
            any bound may be missing (None = unbounded).
  edge   -- open piece of a curve, x in (x_lo, x_hi).
  wall   -- open vertical segment at x, y in (y_lo, y_hi).
  vertex -- a single point.

Relation codes follow the two-bit convention: a curve lies above (00) or
below (01) a cell, crosses its interior (10), or contains it (11).
"""

from __future__ import annotations

from .curves import crossing, side_of
from .exact import rat, sign

ABOVE = 0b00
BELOW = 0b01
CROSSES = 0b10
CONTAINS = 0b11

CODE_NAMES = {ABOVE: "above", BELOW: "below", CROSSES: "crosses", CONTAINS: "contains"}


class Cell:
    __slots__ = ("kind", "x_lo", "x_hi", "bot", "top", "curve", "x", "y_lo",
                 "y_hi", "point")

    def __init__(self, kind, **kw):
        self.kind = kind
        for f in self.__slots__[1:]:
            setattr(self, f, kw.get(f))

    @staticmethod
    def trap(x_lo, x_hi, bot, top):
        return Cell("trap", x_lo=x_lo, x_hi=x_hi, bot=bot, top=top)

    @staticmethod
    def edge(curve, x_lo, x_hi):
        return Cell("edge", curve=curve, x_lo=x_lo, x_hi=x_hi)

    @staticmethod
    def wall(x, y_lo, y_hi):
        return Cell("wall", x=x, y_lo=y_lo, y_hi=y_hi)

    @staticmethod
    def vertex(point):
        return Cell("vertex", point=point)

    @property
    def dim(self):
        return {"trap": 2, "edge": 1, "wall": 1, "vertex": 0}[self.kind]

    def __repr__(self):
        if self.kind == "trap":
            ids = lambda c: None if c is None else c.id
            return f"Cell.trap({self.x_lo},{self.x_hi},bot={ids(self.bot)},top={ids(self.top)})"
        if self.kind == "edge":
            return f"Cell.edge({self.curve.id},{self.x_lo},{self.x_hi})"
        if self.kind == "wall":
            return f"Cell.wall(x={self.x},{self.y_lo},{self.y_hi})"
        return f"Cell.vertex({self.point})"

    def contains_point(self, p):
        """Exact open-cell membership."""
        x, y = p
        if self.kind == "trap":
            return ((self.x_lo is None or self.x_lo < x)
                    and (self.x_hi is None or x < self.x_hi)
                    and (self.bot is None or self.bot.y_at(x) < y)
                    and (self.top is None or y < self.top.y_at(x)))
        if self.kind == "edge":
            return ((self.x_lo is None or self.x_lo < x)
                    and (self.x_hi is None or x < self.x_hi)
                    and self.curve.y_at(x) == y)
        if self.kind == "wall":
            return (x == self.x
                    and (self.y_lo is None or self.y_lo < y)
                    and (self.y_hi is None or y < self.y_hi))
        return self.point == (x, y)


def probe_x(x_lo, x_hi):
    """A canonical exact x strictly inside the interval (None = infinite)."""
    if x_lo is None and x_hi is None:
        return rat(0)
    if x_lo is None:
        return x_hi - 1
    if x_hi is None:
        return x_lo + 1
    return rat(x_lo + x_hi, 2)


def side_in_range(c, other, x_lo, x_hi, avoid=None):
    """Sign of c - other on the open x-interval, which must not contain a
    crossing of the two; `avoid` is the crossing x to dodge when probing."""
    px = probe_x(x_lo, x_hi)
    if avoid is not None and px == avoid:
        px = probe_x(x_lo, px) if x_lo != px else probe_x(px, x_hi)
    s = sign(c.y_at(px) - other.y_at(px))
    if s == 0:
        # probe accidentally hit the unique crossing; any second distinct
        # probe inside the interval cannot
        px2 = probe_x(x_lo, px)
        if px2 == px:
            px2 = probe_x(px, x_hi)
        s = sign(c.y_at(px2) - other.y_at(px2))
    assert s != 0
    return s


def curve_side_constraint(c, bound, want_below):
    """The open x-interval where curve c is strictly below (want_below) or
    above the bound curve, as (lo, hi) with None = infinite; the two cross
    exactly once at the returned point."""
    q = crossing(c, bound)
    s_left = sign(c.y_at(q[0] - 1) - bound.y_at(q[0] - 1))
    if s_left == 0:  # polyline ray regimes can coincide left of the crossing
        s_left = -sign(c.y_at(q[0] + 1) - bound.y_at(q[0] + 1))
    ok_left = (s_left < 0) if want_below else (s_left > 0)
    return ((None, q[0]) if ok_left else (q[0], None)), q


def _interval_and(a, b):
    lo = a[0] if b[0] is None else b[0] if a[0] is None else max(a[0], b[0])
    hi = a[1] if b[1] is None else b[1] if a[1] is None else min(a[1], b[1])
    return lo, hi


def interval_empty(lo, hi):
    return lo is not None and hi is not None and lo >= hi


def arc_in_trap(c, tr):
    """Open x-interval where curve c runs strictly inside the trapezoid,
    or None when it never enters. Boundary curves of the trapezoid never
    enter it."""
    iv = (tr.x_lo, tr.x_hi)
    if tr.top is not None:
        if c.id == tr.top.id:
            return None
        cons, _ = curve_side_constraint(c, tr.top, want_below=True)
        iv = _interval_and(iv, cons)
    if tr.bot is not None:
        if c.id == tr.bot.id:
            return None
        cons, _ = curve_side_constraint(c, tr.bot, want_below=False)
        iv = _interval_and(iv, cons)
    if interval_empty(*iv):
        return None
    return iv


def classify(cell, c):
    """Relation of curve c to a cell, plus hit descriptors when it crosses.

    Hits are ('pt', (x, y)) for finite boundary points and ('L'|'R', id)
    for escapes towards x = -inf/+inf (possible only on unbounded cells).
    """
    if cell.kind == "trap":
        if cell.top is not None and c.id == cell.top.id:
            return ABOVE, []
        if cell.bot is not None and c.id == cell.bot.id:
            return BELOW, []
        iv = arc_in_trap(c, cell)
        if iv is None:
            code = _above_or_below_trap(cell, c)
            return code, []
        hits = []
        for bound, symbol in ((iv[0], "L"), (iv[1], "R")):
            if bound is None:
                hits.append((symbol, c))
            else:
                hits.append(("pt", (bound, c.y_at(bound))))
        return CROSSES, hits

    if cell.kind == "edge":
        if c.id == cell.curve.id:
            return CONTAINS, []
        q = crossing(c, cell.curve)
        inside = ((cell.x_lo is None or cell.x_lo < q[0])
                  and (cell.x_hi is None or q[0] < cell.x_hi))
        if inside:
            return CROSSES, [("pt", q)]
        s = side_in_range(c, cell.curve, cell.x_lo, cell.x_hi, avoid=q[0])
        return (ABOVE if s > 0 else BELOW), []

    if cell.kind == "wall":
        yv = c.y_at(cell.x)
        if (cell.y_lo is None or cell.y_lo < yv) and (cell.y_hi is None or yv < cell.y_hi):
            return CROSSES, [("pt", (cell.x, yv))]
        if cell.y_hi is not None and yv >= cell.y_hi:
            return ABOVE, []
        return BELOW, []

    s = sign(c.y_at(cell.point[0]) - cell.point[1])
    if s == 0:
        return CONTAINS, []
    return (ABOVE if s > 0 else BELOW), []


def _above_or_below_trap(cell, c):
    """Side of a curve that never enters the (open) trapezoid: either at or
    above the top everywhere over the cell's x-range, or at or below the
    bottom everywhere (continuity rules anything else out)."""
    assert cell.top is not None or cell.bot is not None
    if cell.top is not None:
        q = crossing(c, cell.top)
        s = side_in_range(c, cell.top, cell.x_lo, cell.x_hi, avoid=q[0])
        return ABOVE if s > 0 else BELOW
    return BELOW


def walk_sections(tr, hits):
    """Order boundary hit descriptors along the canonical boundary walk of a
    trapezoid: bottom (x asc), right (y asc, or height order at +inf), top
    (x desc), left (y desc, or height order at -inf, descending).

    Input: iterable of (hit_descriptor, payload). Output: list of positions,
    each a list of payloads sharing one boundary point; position indices are
    list indices.
    """
    bottom, right, top, left = [], [], [], []
    for hit, payload in hits:
        tag = hit[0]
        if tag == "L":
            # escapes to -inf appear in height order at -inf, descending:
            # ascending (slope, offset) of the end form y = s*x - o
            s, o = hit[1].end_form("L")
            left.append(((s, o), ("L", hit[1].id), payload))
        elif tag == "R":
            # escapes to +inf in height order at +inf, ascending
            s, o = hit[1].end_form("R")
            right.append(((s, NegKey(o)), ("R", hit[1].id), payload))
        else:
            x, y = hit[1]
            key = ("pt", x, y)
            if tr.bot is not None and (tr.x_hi is None or x < tr.x_hi) \
                    and y == tr.bot.y_at(x):
                bottom.append((x, key, payload))
            elif tr.x_hi is not None and x == tr.x_hi:
                right.append((y, key, payload))
            elif tr.top is not None and y == tr.top.y_at(x):
                top.append((NegKey(x), key, payload))
            else:
                assert tr.x_lo is not None and x == tr.x_lo, \
                    f"hit {hit} not on boundary of {tr}"
                left.append((NegKey(y), key, payload))
    positions = []
    for section in (bottom, right, top, left):
        section.sort(key=lambda e: e[0])
        for sort_key, point_key, payload in section:
            if positions and positions[-1][0] == point_key:
                positions[-1][1].append(payload)
            else:
                positions.append((point_key, [payload]))
    return positions


class NegKey:
    """Reverses the order of an exact value inside a sort key."""
    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v

    def __lt__(self, other):
        return other.v < self.v

    def __eq__(self, other):
        return isinstance(other, NegKey) and other.v == self.v

    def __hash__(self):
        return hash(("neg", self.v))
