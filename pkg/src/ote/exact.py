"""Exact rational arithmetic, the orientation predicate, shearing and duality.

Every value flowing through the encoder is an int or an exact rational;
nothing in this package ever rounds.
"""

from __future__ import annotations

import math

try:
    from gmpy2 import mpq as _ratimpl
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    from fractions import Fraction as _ratimpl

NEGATIVE = -1
ZERO = 0
POSITIVE = 1


def rat(num, den=1):
    """Exact rational in lowest terms with positive denominator."""
    return _ratimpl(num, den)


def sign(x) -> int:
    if x > 0:
        return POSITIVE
    if x < 0:
        return NEGATIVE
    return ZERO


def orient(p, q, r) -> int:
    """Orientation sign of the triple (p, q, r): +1 counterclockwise,
    -1 clockwise, 0 collinear. Points are (x, y) pairs of exact numbers."""
    return sign((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]))


def dedupe_points(points):
    """Map each point to the id of its first occurrence.

    Returns (representatives, rep_index) where representatives lists the
    distinct points in first-seen order and rep_index[i] is the position of
    points[i] in that list.
    """
    seen = {}
    reps = []
    rep_index = []
    for p in points:
        key = (p[0], p[1])
        if key not in seen:
            seen[key] = len(reps)
            reps.append(p)
        rep_index.append(seen[key])
    return reps, rep_index


def _shear_is_injective(points, eps):
    seen = {}
    for p in points:
        x = p[0] + eps * p[1]
        if x in seen:
            if seen[x] != p:
                return False
        else:
            seen[x] = p
    return True


def shear_normalize(points):
    """Apply x' = x + eps*y with eps > 0 small enough that distinct points
    get distinct x'. Returns (sheared points, eps).

    The map has determinant 1, so the orientation of every triple is
    unchanged. Duplicate points stay duplicates.
    """
    if not points:
        raise ValueError("empty point list")
    reps, _ = dedupe_points(points)
    xs = sorted({p[0] for p in reps})
    gaps = [b - a for a, b in zip(xs, xs[1:])]
    ys = [p[1] for p in reps]
    span = max(ys) - min(ys)
    if gaps and span > 0:
        m = 1 + math.ceil(rat(span) / min(gaps))
    else:
        m = 1
    eps = rat(1, m)
    # The bound above already guarantees injectivity; the halving loop keeps
    # the construction self-verifying rather than trusting the derivation.
    while not _shear_is_injective(reps, eps):
        eps = eps / 2
    return [(p[0] + eps * p[1], p[1]) for p in points], eps


def scale_to_integers(points):
    """Rescale rational coordinates to integers by the common denominator.

    Positive uniform scaling per axis preserves every orientation sign.
    """
    def denom(v):
        return getattr(v, "denominator", 1)

    dx = 1
    dy = 1
    for p in points:
        dx = dx * denom(p[0]) // math.gcd(dx, denom(p[0]))
        dy = dy * denom(p[1]) // math.gcd(dy, denom(p[1]))
    return [(int(p[0] * dx), int(p[1] * dy)) for p in points]


def integer_shear(points):
    """Shear integer points to (M*x + y, y) with M = 1 + y-span.

    Equivalent to shear_normalize followed by scaling x by M (both
    orientation-preserving); keeps all coordinates integral so the dual
    lines have integer slope and intercept.
    """
    ys = [p[1] for p in points]
    m = 1 + (max(ys) - min(ys)) if points else 1
    sheared = [(m * p[0] + p[1], p[1]) for p in points]
    assert len({s for s, _ in sheared}) == len({(x, y) for x, y in points})
    return sheared, m
