"""Hierarchical 1/r-cutting of an arrangement of curves.

Each refinement decomposes a trapezoid by the vertical decomposition of a
small sample of its crossing curves; any subcell still crossed by too many
curves forces the median-slope crossing curve into the decomposition set
(deterministic fallback), so the per-level crossing bounds hold by
construction. Lower-dimensional subcells (curve edges, walls, vertices) are
first-class: degenerate intersections land exactly on them.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field

from collections import deque

from .cells import (ABOVE, BELOW, CONTAINS, CROSSES, Cell, arc_in_trap,
                    classify, probe_x, walk_sections)
from .curves import crossing
from .exact import rat, sign
from .formats import idx_width, slot_width


class ConstructionFailure(RuntimeError):
    pass


@dataclass
class Subcell:
    cell: Cell
    crossers: list = field(default_factory=list)   # curve ids, ascending
    entries: dict = field(default_factory=dict)    # curve id -> entry tuple
    npos: int = 0
    # entry tuples: (code,) for above/below/contains;
    # trap:       (CROSSES, slot, idx_lo, idx_hi)
    # edge/wall:  (CROSSES, idx, dirbit)


def _covers(lo, hi, ilo, ihi):
    """Does the open arc (lo, hi) cover the open interval (ilo, ihi)?"""
    left_ok = lo is None or (ilo is not None and lo <= ilo)
    right_ok = hi is None or (ihi is not None and ihi <= hi)
    return left_ok and right_ok


def _in_open(x, lo, hi):
    return (lo is None or lo < x) and (hi is None or x < hi)


def _xkey(v, positive_inf):
    if v is None:
        return (2,) if positive_inf else (0,)
    return (1, v)


class Subdivision:
    """Vertical decomposition of a few curves clipped to a trapezoid,
    classified against every crossing curve of the parent."""

    def __init__(self, parent, dcurves, crossers):
        self.parent = parent
        self.dcurves = dcurves
        self._build_geometry()
        self._sort_subcells()
        self._classify_all(crossers)

    # ---------------- geometry ----------------

    def _build_geometry(self):
        parent, dcurves = self.parent, self.dcurves
        self.arcs = arcs = {}
        for d in dcurves:
            iv = arc_in_trap(d, parent)
            assert iv is not None, "decomposition curve does not cross the cell"
            arcs[d.id] = iv

        vertices = {}
        for i, d1 in enumerate(dcurves):
            for d2 in dcurves[i + 1:]:
                q = crossing(d1, d2)
                if parent.contains_point(q):
                    vertices.setdefault(q, set()).update((d1.id, d2.id))

        # wall sources: interior vertices (walls both ways) and arc endpoints
        # on the parent's top/bottom boundary (wall into the cell only)
        sources_at = {}
        for q in vertices:
            sources_at.setdefault(q[0], {})[q[1]] = "both"
        for d in dcurves:
            lo, hi = arcs[d.id]
            for b in (lo, hi):
                if b is None or not _in_open(b, parent.x_lo, parent.x_hi):
                    continue
                y = d.y_at(b)
                if parent.bot is not None and y == parent.bot.y_at(b):
                    kind = "up"
                else:
                    assert parent.top is not None and y == parent.top.y_at(b)
                    kind = "down"
                col = sources_at.setdefault(b, {})
                if col.get(y, kind) != kind:
                    kind = "both"
                col[y] = kind
        self.sources_at = sources_at
        self.events = events = sorted(sources_at)
        self.verts_at = verts_at = {}
        for q in vertices:
            verts_at.setdefault(q[0], []).append(q)

        bounds = [parent.x_lo] + events + [parent.x_hi]
        self.intervals = intervals = list(zip(bounds[:-1], bounds[1:]))
        self.stacks = stacks = []      # per interval: list of curves, bottom-up
        for ilo, ihi in intervals:
            px = probe_x(ilo, ihi)
            alive = [d for d in dcurves if _covers(*arcs[d.id], ilo, ihi)]
            order = sorted(((d.y_at(px), d) for d in alive), key=lambda t: t[0])
            assert len({v for v, _ in order}) == len(order)
            stacks.append([d for _, d in order])

        # merge stack gaps into trapezoids across uncut event columns
        def cut_at(x_e, below, above):
            blo = below.y_at(x_e) if below is not None else None
            bhi = above.y_at(x_e) if above is not None else None
            for y in sources_at.get(x_e, ()):
                if (blo is None or blo <= y) and (bhi is None or y <= bhi):
                    return True
            return False

        self.trapmap = trapmap = {}   # (interval idx, gap idx) -> trap index
        geo = []                      # [x_start, below, above, x_end]
        active = {}
        for k, (ilo, ihi) in enumerate(intervals):
            rail = [parent.bot] + stacks[k] + [parent.top]
            new_active = {}
            for j in range(len(rail) - 1):
                below, above = rail[j], rail[j + 1]
                key = (below.id if below is not None else None,
                       above.id if above is not None else None)
                idx = active.get(key)
                if idx is None or cut_at(ilo, below, above):
                    idx = len(geo)
                    geo.append([ilo, below, above, None])
                new_active[key] = idx
                trapmap[(k, j)] = idx
            for key, idx in active.items():
                if new_active.get(key) != idx:
                    geo[idx][3] = ilo
            active = new_active
        for idx in active.values():
            geo[idx][3] = parent.x_hi
        self.traps = [Cell.trap(lo, hi, b, t) for lo, b, t, hi in geo]

        # walls per event column; wall endpoints on curves stay interior to
        # the curves' edge cells (only true vertices become 0-cells)
        self.walls = walls = []
        for x_e in events:
            pins = set()
            if parent.bot is not None:
                pins.add(parent.bot.y_at(x_e))
            if parent.top is not None:
                pins.add(parent.top.y_at(x_e))
            for d in dcurves:
                lo, hi = arcs[d.id]
                if (lo is None or lo <= x_e) and (hi is None or x_e <= hi):
                    pins.add(d.y_at(x_e))
            pins.update(sources_at[x_e])
            spins = sorted(pins)
            seen = set()
            for y0, kind in sources_at[x_e].items():
                pieces = []
                if kind in ("both", "up"):
                    i_up = bisect_right(spins, y0)
                    pieces.append((y0, spins[i_up] if i_up < len(spins) else None))
                if kind in ("both", "down"):
                    i_dn = bisect_left(spins, y0)
                    pieces.append((spins[i_dn - 1] if i_dn > 0 else None, y0))
                for piece in pieces:
                    if piece not in seen:
                        seen.add(piece)
                        walls.append(Cell.wall(x_e, piece[0], piece[1]))
        self.dim0 = sorted(vertices)

        # edges: arcs split at the subdivision points lying on them
        splits = {d.id: [] for d in dcurves}
        for p in self.dim0:
            for d in dcurves:
                lo, hi = arcs[d.id]
                if _in_open(p[0], lo, hi) and d.y_at(p[0]) == p[1]:
                    splits[d.id].append(p[0])
        self.edges = edges = []
        for d in dcurves:
            lo, hi = arcs[d.id]
            xs = [lo] + sorted(set(splits[d.id])) + [hi]
            for u, v in zip(xs[:-1], xs[1:]):
                edges.append(Cell.edge(d, u, v))

    def _sort_subcells(self):
        cells = ([Cell.vertex(p) for p in self.dim0]
                 + self.edges + self.walls + self.traps)
        subcells = [Subcell(c) for c in cells]
        subcells.sort(key=lambda sc: _subcell_sort_key(sc.cell))
        self.subcells = subcells
        self.index_of = {id(sc.cell): i for i, sc in enumerate(subcells)}
        self.dim0_idx = {sc.cell.point: i for i, sc in enumerate(subcells)
                         if sc.cell.kind == "vertex"}
        self.edge_cells = {}
        for c in self.edges:
            self.edge_cells.setdefault(c.curve.id, []).append(c)
        for lst in self.edge_cells.values():
            lst.sort(key=lambda e: _xkey(e.x_lo, False))
        self.walls_at = {}
        for c in self.walls:
            self.walls_at.setdefault(c.x, []).append(c)

    # ---------------- classification ----------------

    def _classify_all(self, crossers):
        dids = {d.id for d in self.dcurves}
        trap_hits = {self.index_of[id(c)]: [] for c in self.traps}
        wall_hits = {self.index_of[id(c)]: [] for c in self.walls}
        edge_hits = {self.index_of[id(c)]: [] for c in self.edges}

        for gamma in crossers:
            if gamma.id in dids:
                for sc in self.subcells:
                    code, _ = classify(sc.cell, gamma)
                    assert code != CROSSES, \
                        f"decomposition curve {gamma.id} crosses {sc.cell}"
                    sc.entries[gamma.id] = (code,)
            else:
                self._walk_crosser(gamma, trap_hits, wall_hits, edge_hits)

        for i, hits in trap_hits.items():
            sc = self.subcells[i]
            flat = [(h, gid) for gid, pair in hits for h in pair]
            positions = walk_sections(sc.cell, flat)
            sc.npos = len(positions)
            where = {}
            for idx, (_, payloads) in enumerate(positions):
                for gid in payloads:
                    where.setdefault(gid, []).append(idx)
            sc.crossers = sorted(where)
            slot = {gid: k for k, gid in enumerate(sc.crossers)}
            for gid, idxs in where.items():
                assert len(idxs) == 2, \
                    f"curve {gid} has {len(idxs)} hits on {sc.cell}"
                sc.entries[gid] = (CROSSES, slot[gid], idxs[0], idxs[1])

        for hits_map in (wall_hits, edge_hits):
            for i, hits in hits_map.items():
                sc = self.subcells[i]
                hits.sort(key=lambda t: t[0])
                pos = -1
                prev = None
                for coord, gid, dirbit in hits:
                    if prev is None or coord != prev:
                        pos += 1
                        prev = coord
                    sc.entries[gid] = (CROSSES, pos, dirbit)
                    sc.crossers.append(gid)
                sc.npos = pos + 1
                sc.crossers.sort()

        for sc in self.subcells:
            for c in crossers:
                assert c.id in sc.entries, f"no entry for {c.id} vs {sc.cell}"

    def _walk_crosser(self, gamma, trap_hits, wall_hits, edge_hits):
        g = gamma.id
        arc = arc_in_trap(gamma, self.parent)
        assert arc is not None, f"curve {g} does not cross the cell"
        alo, ahi = arc
        events = self.events

        qd = {}      # d.id -> crossing with gamma
        s_left = {}  # d.id -> sign of gamma - d left of the crossing
        for d in self.dcurves:
            q = crossing(gamma, d)
            qd[d.id] = q
            s = sign(gamma.y_at(q[0] - 1) - d.y_at(q[0] - 1))
            if s == 0:
                s = -sign(gamma.y_at(q[0] + 1) - d.y_at(q[0] + 1))
            assert s != 0
            s_left[d.id] = s

        entries = {}
        col_val = {}
        features = {}   # x -> (kind, point, data)
        for d in self.dcurves:
            q = qd[d.id]
            if _in_open(q[0], alo, ahi):
                features[q[0]] = ("pending", q, d.id)
        lo_i = bisect_right(events, alo) if alo is not None else 0
        hi_i = bisect_left(events, ahi) if ahi is not None else len(events)
        for x_e in events[lo_i:hi_i]:
            yv = gamma.y_at(x_e)
            col_val[x_e] = yv
            p = (x_e, yv)
            if p in self.dim0_idx:
                features[x_e] = ("dim0", p, None)
                continue
            for w in self.walls_at.get(x_e, ()):
                if (w.y_lo is None or w.y_lo < yv) and (w.y_hi is None or yv < w.y_hi):
                    assert x_e not in features
                    features[x_e] = ("wall", p, w)
                    break

        resolved = []
        for x in sorted(features):
            kind, p, data = features[x]
            if kind == "pending":
                kind = "dim0" if p in self.dim0_idx else "edge"
            resolved.append((x, kind, p, data))

        for x, kind, p, data in resolved:
            if kind == "dim0":
                entries[self.dim0_idx[p]] = (CONTAINS,)
            elif kind == "wall":
                i = self.index_of[id(data)]
                wall_hits[i].append((p[1], g, 0))
                entries[i] = None
            else:
                ecells = self.edge_cells[data]
                k = bisect_right([_xkey(c.x_lo, False) for c in ecells],
                                 (1, x)) - 1
                ec = ecells[k]
                assert _in_open(x, ec.x_lo, ec.x_hi)
                i = self.index_of[id(ec)]
                dirbit = 1 if s_left[data] < 0 else 0
                edge_hits[i].append((x, g, dirbit))
                entries[i] = None

        # stretches between consecutive features cross one trapezoid each
        marks = [alo] + [r[0] for r in resolved] + [ahi]
        for u, v in zip(marks[:-1], marks[1:]):
            px = probe_x(u, v)
            k = bisect_right(events, px)
            yv = gamma.y_at(px)
            stack = self.stacks[k]
            lo, hi = 0, len(stack)
            while lo < hi:
                mid = (lo + hi) // 2
                sv = stack[mid].y_at(px)
                assert sv != yv
                if sv < yv:
                    lo = mid + 1
                else:
                    hi = mid
            ti = self.trapmap[(k, lo)]
            i = self.index_of[id(self.traps[ti])]
            hit_lo = ("L", gamma) if u is None else ("pt", (u, gamma.y_at(u)))
            hit_hi = ("R", gamma) if v is None else ("pt", (v, gamma.y_at(v)))
            trap_hits[i].append((g, (hit_lo, hit_hi)))
            entries[i] = None

        # everything else lies above or below
        for i, sc in enumerate(self.subcells):
            if i in entries:
                continue
            cell = sc.cell
            if cell.kind == "trap":
                entries[i] = (_side_vs_trap(gamma, cell),)
            elif cell.kind == "wall":
                yv = col_val.get(cell.x)
                if yv is None:
                    yv = gamma.y_at(cell.x)
                if cell.y_hi is not None and yv >= cell.y_hi:
                    entries[i] = (ABOVE,)
                else:
                    assert cell.y_lo is not None and yv <= cell.y_lo
                    entries[i] = (BELOW,)
            elif cell.kind == "edge":
                q = qd[cell.curve.id]
                s = s_left[cell.curve.id]
                if not (cell.x_hi is not None and cell.x_hi <= q[0]):
                    assert cell.x_lo is not None and cell.x_lo >= q[0]
                    s = -s
                entries[i] = ((ABOVE,) if s > 0 else (BELOW,))
            else:
                x, y = cell.point
                yv = col_val.get(x)
                if yv is None:
                    yv = gamma.y_at(x)
                s = sign(yv - y)
                assert s != 0
                entries[i] = ((ABOVE,) if s > 0 else (BELOW,))

        for i, e in entries.items():
            if e is not None:
                self.subcells[i].entries[g] = e


def _subcell_sort_key(cell):
    if cell.kind == "vertex":
        iv = (cell.point[0], cell.point[0])
        ykey = (1, cell.point[1])
        rank, extra = 0, (1, cell.point[1])
    elif cell.kind == "wall":
        iv = (cell.x, cell.x)
        ykey = (0,) if cell.y_lo is None else (1, cell.y_lo)
        rank, extra = 1, _xkey(cell.y_hi, True)
    elif cell.kind == "edge":
        iv = (cell.x_lo, cell.x_hi)
        px = probe_x(cell.x_lo, cell.x_hi)
        ykey = (1, cell.curve.y_at(px))
        rank, extra = 2, (1, cell.curve.id)
    else:
        iv = (cell.x_lo, cell.x_hi)
        px = probe_x(cell.x_lo, cell.x_hi)
        ykey = (0,) if cell.bot is None else (1, cell.bot.y_at(px))
        rank = 3
        extra = _xkey(None if cell.top is None else cell.top.y_at(px), True)
    return (_xkey(iv[0], False), _xkey(iv[1], True), ykey, rank, extra)


def _side_vs_trap(gamma, cell):
    """Above/below code for a curve known not to enter the open trapezoid."""
    if cell.top is None:
        return BELOW
    px = probe_x(cell.x_lo, cell.x_hi)
    s = sign(gamma.y_at(px) - cell.top.y_at(px))
    assert s != 0
    return ABOVE if s > 0 else BELOW


# ---------------- refinement and the hierarchy ----------------

@dataclass
class CellNode:
    depth: int
    cell: Cell
    crossers: list                   # curve ids, ascending
    kind: str = "term"               # internal | leaf | term
    index: int = -1                  # per-depth index (internal) or leaf id
    children: list = None            # CellNode list, canonical order (internal)
    sigs: list = None                # per crosser (slot order): (bits, nbits)
    w_slot: int = 1                  # payload field widths of this cell's sigs
    w_idx: int = 1
    path: tuple = ()


@dataclass
class CuttingHierarchy:
    curves: list
    n: int
    r: int
    t: int
    seed: int
    sample_factor: float
    root: CellNode
    levels: list                     # levels[d] = internal nodes at depth d
    leaves: list
    max_depth: int

    def bound(self, depth):
        """Crossing cap for depth-d cells; unrefined cells may carry up to
        the leaf threshold past the raw floor(n / r^d)."""
        return max(self.n // self.r ** depth, self.t if depth else self.n)

    def all_nodes(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            if node.children:
                stack.extend(reversed(node.children))


def sample_size(r, factor):
    return max(2, math.ceil(factor * r * math.log(r + 1)))


def _cell_seed(seed, path):
    h = seed & 0x7FFFFFFFFFFFFFFF
    for c in path:
        h = (h * 1000003 + c + 1) & 0x7FFFFFFFFFFFFFFF
    return h


def _median_split_curve(subcell, curves_by_id):
    """Crossing curve of median slope within the subcell (deterministic)."""
    cell = subcell.cell
    if cell.kind == "wall":
        px = cell.x
    else:
        px = probe_x(cell.x_lo, cell.x_hi)
    keyed = sorted((curves_by_id[g].slope_at(px), curves_by_id[g].y_at(px), g)
                   for g in subcell.crossers)
    return curves_by_id[keyed[len(keyed) // 2][2]]


def refine_cell(cell, crossers, r, seed, threshold, sample_factor=0.5,
                curves_by_id=None, max_rounds=None):
    """One refinement: decompose by a random sample, then locally split any
    subcell still crossed by more than `threshold` curves (trapezoids by
    their median-slope crossing curve, lower-dimensional cells at their
    median crossing position). Deterministic given (inputs, seed)."""
    if curves_by_id is None:
        curves_by_id = {c.id: c for c in crossers}
    rng = random.Random(seed)
    m = len(crossers)
    # sample size is driven by the reduction this refinement actually needs
    # (m/threshold = r for full cells, much less near the leaf boundary)
    ratio = max(1.0, m / max(threshold, 1))
    s = min(m, max(1, math.ceil(sample_factor * ratio * math.log(ratio + 1))))
    dcurves = sorted(rng.sample(crossers, s), key=lambda c: c.id)
    sub = Subdivision(cell, dcurves, crossers)
    crosser_ids = [c.id for c in crossers]
    rounds = 0
    cap = (4 * m + 64) if max_rounds is None else max_rounds
    while True:
        worst = None
        for sc in sub.subcells:
            if len(sc.crossers) > threshold:
                if worst is None or len(sc.crossers) > len(worst.crossers):
                    worst = sc
        if worst is None:
            sub.subcells.sort(key=lambda sc: _subcell_sort_key(sc.cell))
            return sub
        rounds += 1
        if rounds > cap:
            raise ConstructionFailure(
                f"refinement did not converge after {rounds} rounds")
        if worst.cell.kind == "trap":
            pieces = _split_trap(worst, crosser_ids, curves_by_id)
        else:
            pieces = _split_dim1(worst, crosser_ids, curves_by_id)
        sub.subcells.remove(worst)
        sub.subcells.extend(pieces)


def _split_trap(worst, crosser_ids, curves_by_id):
    """Replace an overfull trapezoid by its decomposition along the
    median-slope crossing curve; curves not crossing it keep their code."""
    med = _median_split_curve(worst, curves_by_id)
    inner = [curves_by_id[g] for g in worst.crossers]
    nested = Subdivision(worst.cell, [med], inner)
    for sc in nested.subcells:
        merged = {g: worst.entries[g] for g in crosser_ids}
        merged.update(sc.entries)
        sc.entries = merged
    return nested.subcells


def _split_dim1(worst, crosser_ids, curves_by_id):
    """Split an overfull edge or wall at its median crossing position into
    two pieces and a vertex; all codes are derived from the stored entries
    (position order and direction bits), with no new geometry probing."""
    cell = worst.cell
    by_pos = {}
    for g in worst.crossers:
        entry = worst.entries[g]
        by_pos.setdefault(entry[1], []).append(g)
    npos = worst.npos
    p_star = sorted(by_pos)[len(by_pos) // 2]
    anchor = curves_by_id[by_pos[p_star][0]]
    if cell.kind == "edge":
        q = crossing(anchor, cell.curve)
        left = Cell.edge(cell.curve, cell.x_lo, q[0])
        right = Cell.edge(cell.curve, q[0], cell.x_hi)
    else:
        q = (cell.x, anchor.y_at(cell.x))
        left = Cell.wall(cell.x, cell.y_lo, q[1])
        right = Cell.wall(cell.x, q[1], cell.y_hi)
    mid = Cell.vertex(q)
    pieces = [Subcell(left), Subcell(mid), Subcell(right)]
    for sc in pieces:
        sc.entries = {g: worst.entries[g] for g in crosser_ids}
    lo_sc, mid_sc, hi_sc = pieces
    for g in worst.crossers:
        _, pos, dirbit = worst.entries[g]
        if pos < p_star:
            lo_sc.entries[g] = (CROSSES, pos, dirbit)
            lo_sc.crossers.append(g)
            # dirbit: cell points before the crossing lie above the curve;
            # past the crossing the sides swap. Walls are always crossed
            # upward (dirbit 0), so pieces above the crossing see the curve
            # below them.
            if cell.kind == "edge":
                far = ABOVE if dirbit == 1 else BELOW
            else:
                far = BELOW
            mid_sc.entries[g] = (far,)
            hi_sc.entries[g] = (far,)
        elif pos > p_star:
            hi_sc.entries[g] = (CROSSES, pos - p_star - 1, dirbit)
            hi_sc.crossers.append(g)
            if cell.kind == "edge":
                near = BELOW if dirbit == 1 else ABOVE
            else:
                near = ABOVE
            mid_sc.entries[g] = (near,)
            lo_sc.entries[g] = (near,)
        else:
            mid_sc.entries[g] = (CONTAINS,)
            lo_sc.entries[g] = (ABOVE,) if cell.kind == "wall" else None
            hi_sc.entries[g] = (BELOW,) if cell.kind == "wall" else None
            if cell.kind == "edge":
                # through the split point: sides from the direction bit
                lo_sc.entries[g] = (BELOW,) if dirbit else (ABOVE,)
                hi_sc.entries[g] = (ABOVE,) if dirbit else (BELOW,)
    lo_sc.crossers.sort()
    hi_sc.crossers.sort()
    lo_sc.npos = p_star
    hi_sc.npos = npos - p_star - 1
    return pieces


def build_cutting(curves, r, t, seed, sample_factor=0.5):
    """Build the full hierarchy: refine every trapezoid crossed by more than
    t curves, parametrized so a cell at depth d is crossed by at most
    floor(n / r^d) curves."""
    if r < 2:
        raise ValueError("r must be at least 2")
    if t < 3:
        raise ValueError("t must be at least 3")
    n = len(curves)
    by_id = {c.id: c for c in curves}
    root = CellNode(depth=0, cell=Cell.trap(None, None, None, None),
                    crossers=sorted(by_id), path=())
    levels = []
    leaves = []
    max_depth = 0
    queue = deque([root])
    while queue:
        node = queue.popleft()
        m = len(node.crossers)
        if node.cell.dim < 2:
            node.kind = "term"
            continue
        if m <= t:
            # cells crossed by fewer than three curves can never be queried
            # into, so they carry no table; the root is the one exception
            # (tiny inputs answer straight from its table)
            if m >= 3 or node.depth == 0:
                node.kind = "leaf"
                node.index = len(leaves)
                leaves.append(node)
            else:
                node.kind = "term"
            continue
        node.kind = "internal"
        while len(levels) <= node.depth:
            levels.append([])
        node.index = len(levels[node.depth])
        levels[node.depth].append(node)
        max_depth = max(max_depth, node.depth + 1)
        # the hierarchy invariant is the per-level bound; cutting a cell all
        # the way to ceil(m/r) when m is far below its level bound (or below
        # the leaf threshold) would shred cells to no purpose. Cells within
        # one r-factor of the leaf threshold finish in a single refinement.
        if m <= r * t:
            threshold = t
        else:
            threshold = max(n // r ** (node.depth + 1), t)
        sub = refine_cell(node.cell, [by_id[g] for g in node.crossers], r,
                          _cell_seed(seed, node.path), threshold,
                          sample_factor, by_id)
        node.children = []
        max_slot = max_idx = 0
        for sc in sub.subcells:
            if sc.crossers:
                max_slot = max(max_slot, len(sc.crossers) - 1)
                max_idx = max(max_idx, sc.npos - 1)
        node.w_slot = max(1, int(max_slot).bit_length())
        node.w_idx = max(1, int(max_idx).bit_length())
        assert node.w_slot <= slot_width(n, r, t, node.depth)
        assert node.w_idx <= idx_width(n, r, t, node.depth)
        dims = [sc.cell.dim for sc in sub.subcells]
        node.sigs = [
            _pack_signature([sc.entries[g] for sc in sub.subcells], dims,
                            node.w_slot, node.w_idx)
            for g in node.crossers]
        for pos, sc in enumerate(sub.subcells):
            child = CellNode(depth=node.depth + 1, cell=sc.cell,
                             crossers=sc.crossers,
                             path=node.path + (pos,))
            node.children.append(child)
            queue.append(child)
    return CuttingHierarchy(curves=curves, n=n, r=r, t=t, seed=seed,
                            sample_factor=sample_factor, root=root,
                            levels=levels, leaves=leaves, max_depth=max_depth)


def _pack_signature(entries, dims, w_slot, w_idx):
    """LSB-first packed signature of one curve across all subcells."""
    acc = 0
    nbits = 0
    for entry, dim in zip(entries, dims):
        acc |= entry[0] << nbits
        nbits += 2
        if entry[0] == CROSSES:
            if dim == 2:
                _, slot, i1, i2 = entry
                assert slot < (1 << w_slot) and i2 < (1 << w_idx)
                acc |= slot << nbits
                nbits += w_slot
                acc |= i1 << nbits
                nbits += w_idx
                acc |= i2 << nbits
                nbits += w_idx
            else:
                _, idx, dirbit = entry
                assert idx < (1 << w_idx)
                acc |= idx << nbits
                nbits += w_idx
                acc |= dirbit << nbits
                nbits += 1
    return acc, nbits


# ---------------- validation ----------------

@dataclass
class ValidationReport:
    ok: bool
    levels: list          # dicts: depth, cells, max_crossing, bound
    problems: list
    crossings_checked: int

    def __str__(self):
        lines = ["cutting validation: " + ("PASS" if self.ok else "FAIL")]
        for lv in self.levels:
            lines.append(
                "  depth {depth}: {cells} cells, max crossing {max_crossing}"
                " <= bound {bound}".format(**lv))
        lines.append(f"  pairwise crossings located: {self.crossings_checked}")
        lines.extend("  problem: " + p for p in self.problems)
        return "\n".join(lines)


def validate_cutting(h, check_pairs=True):
    """Recount every cell's crossing list geometrically, check the per-depth
    bounds, and locate every pairwise crossing point through the hierarchy,
    verifying it falls in exactly one subcell per level."""
    problems = []
    by_id = {c.id: c for c in h.curves}
    stats = {}

    def note(depth, count):
        st = stats.setdefault(depth, {"cells": 0, "max": 0})
        st["cells"] += 1
        st["max"] = max(st["max"], count)

    note(0, len(h.root.crossers))
    if len(h.root.crossers) != h.n:
        problems.append("root does not hold all curves")
    stack = [h.root]
    while stack:
        node = stack.pop()
        if not node.children:
            continue
        parent_crossers = [by_id[g] for g in node.crossers]
        for pos, child in enumerate(node.children):
            recount = [c.id for c in parent_crossers
                       if classify(child.cell, c)[0] == CROSSES]
            if recount != child.crossers:
                missing = set(recount) - set(child.crossers)
                extra = set(child.crossers) - set(recount)
                what = []
                if missing:
                    what.append(f"missing curve(s) {sorted(missing)}")
                if extra:
                    what.append(f"extra curve(s) {sorted(extra)}")
                problems.append(
                    f"crossing list at depth {child.depth} cell"
                    f" {node.path + (pos,)}: " + ", ".join(what))
            bound = h.bound(child.depth)
            if len(child.crossers) > bound:
                problems.append(
                    f"depth {child.depth} cell {node.path + (pos,)} crossed by"
                    f" {len(child.crossers)} > {bound}")
            note(child.depth, len(child.crossers))
            stack.append(child)

    checked = 0
    if check_pairs:
        curves = h.curves
        for i in range(len(curves)):
            for j in range(i + 1, len(curves)):
                q = crossing(curves[i], curves[j])
                node = h.root
                while node.children:
                    containers = [c for c in node.children
                                  if c.cell.contains_point(q)]
                    if len(containers) != 1:
                        problems.append(
                            f"crossing of {i},{j} at {q} lies in"
                            f" {len(containers)} subcells of {node.path}")
                        break
                    node = containers[0]
                checked += 1

    depth_cap = math.ceil(math.log(max(h.n, 1) / h.t, h.r)) + 2 if h.n > h.t else 2
    if h.max_depth > depth_cap:
        problems.append(f"depth {h.max_depth} exceeds {depth_cap}")

    level_rows = [
        {"depth": d, "cells": st["cells"], "max_crossing": st["max"],
         "bound": h.bound(d)}
        for d, st in sorted(stats.items())]
    return ValidationReport(ok=not problems, levels=level_rows,
                            problems=problems, crossings_checked=checked)
