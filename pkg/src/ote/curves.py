"""Dual lines and x-monotone polylines behind one curve interface.

A curve is either the dual line y = a*x - b of a point (a, b), or an
x-monotone polyline with horizontal end rays (the geometric realization of
one wire of a wiring diagram). Any two distinct curves of an arrangement
cross exactly once; polylines are validated for this at ingest.
"""

from __future__ import annotations

from bisect import bisect_right

from .exact import rat, sign


class MalformedPolyline(ValueError):
    """Two polylines of one arrangement cross other than exactly once."""


class Curve:
    __slots__ = ("kind", "a", "b", "xs", "ys", "id", "xcache")

    def __init__(self, kind, a=None, b=None, xs=None, ys=None, id=None):
        self.kind = kind
        self.a = a      # line slope
        self.b = b      # line offset: y = a*x - b
        self.xs = xs    # polyline breakpoint x's (strictly increasing)
        self.ys = ys    # polyline breakpoint y's
        self.id = id
        self.xcache = None   # crossing memo, valid within one arrangement

    @staticmethod
    def line(slope, offset, id=None):
        return Curve("line", a=slope, b=offset, id=id)

    @staticmethod
    def polyline(xs, ys, id=None):
        if len(xs) != len(ys) or not xs:
            raise MalformedPolyline("breakpoint lists must be equal and non-empty")
        if any(x1 >= x2 for x1, x2 in zip(xs, xs[1:])):
            raise MalformedPolyline("polyline is not strictly x-monotone")
        return Curve("polyline", xs=list(xs), ys=list(ys), id=id)

    def __repr__(self):
        if self.kind == "line":
            return f"Curve.line({self.a}, {self.b}, id={self.id})"
        return f"Curve.polyline(<{len(self.xs)} pts>, id={self.id})"

    def y_at(self, x):
        """Exact y-value at x (end rays are horizontal for polylines)."""
        if self.kind == "line":
            return self.a * x - self.b
        xs, ys = self.xs, self.ys
        if x <= xs[0]:
            return ys[0]
        if x >= xs[-1]:
            return ys[-1]
        i = bisect_right(xs, x) - 1
        if xs[i] == x:
            return ys[i]
        dx = xs[i + 1] - xs[i]
        return ys[i] + (ys[i + 1] - ys[i]) * rat(x - xs[i], 1) / dx

    def end_form(self, side):
        """(s, c) with the curve behaving as y = s*x - c beyond its
        breakpoints on the given side ('L' or 'R')."""
        if self.kind == "line":
            return (self.a, self.b)
        return (0, -self.ys[0]) if side == "L" else (0, -self.ys[-1])

    def slope_at(self, x):
        """Slope of the piece under x (rays are horizontal)."""
        if self.kind == "line":
            return self.a
        xs, ys = self.xs, self.ys
        if x <= xs[0] or x >= xs[-1]:
            return 0
        i = bisect_right(xs, x) - 1
        return rat(ys[i + 1] - ys[i], 1) / (xs[i + 1] - xs[i])

    def breaks(self):
        return self.xs if self.kind == "polyline" else ()


def dualize(p, id=None):
    """Dual line y = x_p * x - y_p of the point p."""
    return Curve.line(p[0], p[1], id=id)


def sign_at_minus_inf(c1, c2):
    """Sign of c1(x) - c2(x) as x -> -infinity."""
    s1, o1 = c1.end_form("L")
    s2, o2 = c2.end_form("L")
    return sign(s2 - s1) or sign(o2 - o1)


def sign_at_plus_inf(c1, c2):
    s1, o1 = c1.end_form("R")
    s2, o2 = c2.end_form("R")
    return sign(s1 - s2) or sign(o2 - o1)


def all_crossings(c1, c2):
    """All proper crossing points of two curves, in x order.

    A valid arrangement pair has exactly one; callers that only dedupe or
    validate use the full list.
    """
    if c1.kind == "line" and c2.kind == "line":
        if c1.a == c2.a:
            return []  # parallel or identical; excluded after shearing
        x = rat(c1.b - c2.b, 1) / (c1.a - c2.a)
        return [(x, c1.y_at(x))]

    xs = sorted(set(c1.breaks()) | set(c2.breaks()))
    # Piecewise-linear difference: scan signs at -inf, breakpoints, +inf.
    pts = []
    s_prev = sign_at_minus_inf(c1, c2)
    if s_prev == 0:
        raise MalformedPolyline("curves coincide towards x = -infinity")
    x_prev = None
    for x in xs + [None]:
        s_here = sign_at_plus_inf(c1, c2) if x is None else sign(c1.y_at(x) - c2.y_at(x))
        if s_here * s_prev < 0:
            # one linear crossing strictly between x_prev and x
            pts.append(_segment_crossing(c1, c2, x_prev, x))
            s_prev = s_here
        elif s_here == 0 and x is not None:
            pts.append((x, c1.y_at(x)))
            # sign after the touch is picked up at the next breakpoint
            s_nxt = _sign_after(c1, c2, x)
            if s_nxt == 0:
                raise MalformedPolyline("curves overlap on a segment")
            if s_nxt == s_prev:
                raise MalformedPolyline("curves touch without crossing")
            s_prev = s_nxt
        elif s_here != 0:
            s_prev = s_here
        x_prev = x
    return pts


def _sign_after(c1, c2, x):
    nxt = [b for b in sorted(set(c1.breaks()) | set(c2.breaks())) if b > x]
    probe = rat(x + nxt[0], 2) if nxt else x + 1
    s = sign(c1.y_at(probe) - c2.y_at(probe))
    return s if s else sign_at_plus_inf(c1, c2)


def _segment_crossing(c1, c2, x_lo, x_hi):
    """Crossing of two curves known to be linear and sign-changing on
    (x_lo, x_hi); either bound may be None (both curves are then still
    linear one unit past the other bound)."""
    if x_lo is None:
        x_lo = x_hi - 1
    if x_hi is None:
        x_hi = x_lo + 1
    # On the slab both curves are straight: solve the two chords exactly.
    y1l, y1h = c1.y_at(x_lo), c1.y_at(x_hi)
    y2l, y2h = c2.y_at(x_lo), c2.y_at(x_hi)
    dx = x_hi - x_lo
    s1 = rat(y1h - y1l, 1) / dx
    s2 = rat(y2h - y2l, 1) / dx
    x = x_lo + rat(y2l - y1l, 1) / (s1 - s2)
    return (x, c1.y_at(x))


def crossing(c1, c2):
    """The unique crossing point of two distinct curves (memoized; curve
    ids must be unique within the arrangement)."""
    if c1.xcache is None:
        c1.xcache = {}
    q = c1.xcache.get(c2.id)
    if q is not None:
        return q
    pts = all_crossings(c1, c2)
    if len(pts) != 1:
        raise MalformedPolyline(
            f"curves {c1.id} and {c2.id} cross {len(pts)} times, expected 1")
    q = pts[0]
    c1.xcache[c2.id] = q
    if c2.xcache is None:
        c2.xcache = {}
    c2.xcache[c1.id] = q
    return q


def side_of(c, p):
    """Sign of p.y - c(p.x): +1 when p is above the curve."""
    return sign(p[1] - c.y_at(p[0]))


def validate_arrangement(curves):
    """Every pair must cross exactly once. Lines additionally need pairwise
    distinct slopes (guaranteed by shearing). Raises MalformedPolyline."""
    for i, c1 in enumerate(curves):
        for c2 in curves[i + 1:]:
            if c1.kind == "line" and c2.kind == "line":
                if c1.a == c2.a:
                    raise MalformedPolyline(
                        f"lines {c1.id} and {c2.id} share a slope")
            else:
                crossing(c1, c2)
