"""Answer orientation queries from the encoding bytes alone.

This module never touches coordinates: it consumes only the bit sections
described in formats.py. A query walks the hierarchy: locate the crossing
of the first two curves among the current cell's subcells (alternation of
their boundary indices), read the third curve's location code there, and
either answer or descend. Queries that reach a leaf are answered from its
lookup table.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

from . import formats as fmt
from .bitio import BitReader

ABOVE = 0b00
BELOW = 0b01
CROSSES = 0b10
CONTAINS = 0b11


class DecodeError(Exception):
    pass


class BadMagic(DecodeError):
    pass


class UnsupportedVersion(DecodeError):
    pass


class TruncatedInput(DecodeError):
    pass


class MalformedEncoding(DecodeError):
    pass


class IndexOutOfRange(DecodeError, IndexError):
    pass


@dataclass
class QueryTrace:
    steps: list = field(default_factory=list)  # (level, cell, subcell, relation)
    terminal: str = ""

    @property
    def step_count(self):
        return len(self.steps)


@dataclass
class Header:
    version: int
    mode: int
    n: int
    r: int
    t: int
    n_levels: int
    offsets: tuple


def parse_header(data):
    if len(data) < fmt.HEADER_BYTES:
        raise TruncatedInput("shorter than the fixed header")
    if data[:4] != fmt.MAGIC:
        raise BadMagic(f"magic {data[:4]!r}")
    version, mode, _ = struct.unpack_from("<HBB", data, 4)
    if version != fmt.VERSION:
        raise UnsupportedVersion(f"version {version}")
    n, r, t, n_levels = struct.unpack_from("<QQQQ", data, 8)
    offsets = struct.unpack_from("<6Q", data, 40)
    prev = fmt.HEADER_BYTES
    for off in offsets:
        if off < prev or off > len(data):
            raise TruncatedInput(f"section offset {off} out of bounds")
        prev = off
    return Header(version=version, mode=mode, n=n, r=r, t=t,
                  n_levels=n_levels, offsets=offsets)


class _Level:
    __slots__ = ("count", "w_ref", "widths", "rec_bits", "rec_base", "cells")

    def __init__(self, count, w_ref, widths, rec_bits, rec_base):
        self.count = count
        self.w_ref = w_ref
        self.widths = widths          # (sig_base, m, k, zeta, desc_base)
        self.rec_bits = rec_bits
        self.rec_base = rec_base
        self.cells = {}


class _CellRec:
    __slots__ = ("sig_base", "m", "zeta", "w_slot", "w_idx", "dims", "kinds",
                 "refs")

    def __init__(self, sig_base, m, zeta, w_slot, w_idx, dims, kinds, refs):
        self.sig_base = sig_base
        self.m = m
        self.zeta = zeta
        self.w_slot = w_slot
        self.w_idx = w_idx
        self.dims = dims
        self.kinds = kinds
        self.refs = refs


class Encoding:
    """Parsed view over encoding bytes; immutable and safe to share."""

    def __init__(self, data):
        self.data = bytes(data)
        self.header = parse_header(self.data)
        try:
            self._parse_sections()
        except EOFError as e:
            raise TruncatedInput(str(e)) from None

    def _parse_sections(self):
        off = self.header.offsets
        self._r_slope = BitReader(self.data, off[0] * 8)
        self.n_curves = self._r_slope.read(64)
        w = fmt.rank_width(self.n_curves)
        self.slope_rank = [self._r_slope.read(w) for _ in range(self.n_curves)]
        rd = BitReader(self.data, off[1] * 8)
        self.dup = [rd.read(w) for _ in range(self.header.n)]
        if any(ci >= self.n_curves for ci in self.dup):
            raise MalformedEncoding("duplicate map points past the curves")

        self._dir_bit0 = off[2] * 8
        rd = BitReader(self.data, self._dir_bit0)
        self.levels = []
        for _ in range(self.header.n_levels):
            count = rd.read(32)
            desc_bits = rd.read(48)
            w_ref = rd.read(8)
            widths = tuple(rd.read(8) for _ in range(5))
            rec_bits = fmt.cell_record_bits(*widths)
            self.levels.append(_Level(count, w_ref, widths, rec_bits, rd.pos))
            rd.seek(rd.pos + count * rec_bits + desc_bits)

        rd = BitReader(self.data, off[4] * 8)
        n_leaves = rd.read(64)
        self.psi = rd.read(8)
        w_m = fmt.leaf_m_width(self.n_curves, self.header.t,
                               self.header.n_levels)
        self.leaf_m = []
        self.leaf_ptr = []
        for _ in range(n_leaves):
            self.leaf_m.append(rd.read(w_m))
            self.leaf_ptr.append(rd.read(self.psi))
        self._sig_bit0 = off[3] * 8
        self._tab_bit0 = off[5] * 8
        self._sigs = {}

    # ---------------- structure access ----------------

    def cell(self, depth, index):
        level = self.levels[depth]
        rec = level.cells.get(index)
        if rec is not None:
            return rec
        if index >= level.count:
            raise MalformedEncoding(f"cell {index} past level {depth}")
        rd = BitReader(self.data,
                       level.rec_base + index * level.rec_bits)
        w_sig_base, w_m, w_k, w_zeta, w_desc_base = level.widths
        sig_base = rd.read(w_sig_base)
        m = rd.read(w_m)
        k = rd.read(w_k)
        zeta = rd.read(w_zeta)
        w_slot = rd.read(fmt.WIDTH_BITS)
        w_idx = rd.read(fmt.WIDTH_BITS)
        desc_base = rd.read(w_desc_base)
        rd.seek(self._dir_bit0 + desc_base)
        dims = []
        kinds = []
        refs = []
        for _ in range(k):
            dims.append(rd.read(2))
            kind = rd.read(2)
            kinds.append(kind)
            refs.append(rd.read(level.w_ref) if kind else 0)
        rec = _CellRec(sig_base, m, zeta, w_slot, w_idx, dims, kinds, refs)
        level.cells[index] = rec
        return rec

    def signature(self, depth, index, slot):
        """Parsed signature of the curve in the given slot of an internal
        cell: (codes, interesting) where codes[k] is the two-bit relation to
        subcell k and interesting maps subcell -> payload tuple for crosses
        and contains entries."""
        key = (depth, index, slot)
        got = self._sigs.get(key)
        if got is not None:
            return got
        rec = self.cell(depth, index)
        if slot >= rec.m:
            raise MalformedEncoding(f"slot {slot} past cell ({depth},{index})")
        w_slot = rec.w_slot
        w_idx = rec.w_idx
        rd = BitReader(self.data,
                       self._sig_bit0 + rec.sig_base + slot * rec.zeta)
        codes = []
        interesting = {}
        for k, dim in enumerate(rec.dims):
            code = rd.read(2)
            codes.append(code)
            if code == CROSSES:
                if dim == 2:
                    interesting[k] = (CROSSES, rd.read(w_slot), rd.read(w_idx),
                                      rd.read(w_idx))
                elif dim == 1:
                    interesting[k] = (CROSSES, rd.read(w_idx), rd.read(1))
                else:
                    raise MalformedEncoding("crosses code on a vertex cell")
            elif code == CONTAINS:
                if dim == 2:
                    raise MalformedEncoding("contains code on a trapezoid")
                interesting[k] = (CONTAINS,)
        got = (codes, interesting)
        self._sigs[key] = got
        return got

    # ---------------- queries ----------------

    def locate_intersection(self, depth, index, slot_a, slot_b):
        """Subcell of the internal cell containing the crossing of the two
        curves, per the alternation rules. Returns (subcell ordinal, shared
        dim-1 index or None)."""
        rec = self.cell(depth, index)
        _, int_a = self.signature(depth, index, slot_a)
        _, int_b = self.signature(depth, index, slot_b)
        if len(int_b) < len(int_a):
            int_a, int_b = int_b, int_a
        found = []
        for k, ea in int_a.items():
            eb = int_b.get(k)
            if eb is None:
                continue
            dim = rec.dims[k]
            if dim == 2:
                if ea[0] == CROSSES and eb[0] == CROSSES:
                    i1, i2 = sorted(ea[2:])
                    j1, j2 = eb[2:]
                    if len({i1, i2, j1, j2}) == 4 and \
                            ((i1 < j1 < i2) != (i1 < j2 < i2)):
                        found.append((k, None))
            elif dim == 1:
                if ea[0] == CROSSES and eb[0] == CROSSES:
                    if ea[1] == eb[1]:
                        found.append((k, ea[1]))
                elif ea[0] != eb[0]:  # one contains, the other crosses
                    shared = ea[1] if ea[0] == CROSSES else eb[1]
                    found.append((k, shared))
            else:
                if ea[0] == CONTAINS and eb[0] == CONTAINS:
                    found.append((k, None))
        if len(found) != 1:
            raise MalformedEncoding(
                f"{len(found)} subcells of ({depth},{index}) qualify")
        return found[0]

    def _leaf_chi(self, leaf, sa, sb, sc):
        m = self.leaf_m[leaf]
        if not (sa < m and sb < m and sc < m):
            raise MalformedEncoding("leaf slot out of range")
        i, j, k = sorted((sa, sb, sc))
        parity = 1
        if (sa, sb, sc) in ((i, k, j), (j, i, k), (k, j, i)):
            parity = -1
        rank = fmt.triple_rank(m, i, j, k)
        rd = BitReader(self.data,
                       self._tab_bit0 + self.leaf_ptr[leaf] + 2 * rank)
        return parity * fmt.CODE_TO_SIGN[rd.read(2)]

    def _translate(self, v, ca, cb):
        if v == 0 or self.header.mode == fmt.MODE_ABSTRACT:
            return v
        d = self.slope_rank[cb] - self.slope_rank[ca]
        return v if d > 0 else -v

    def _chi_to_answer(self, chi, ca, cb):
        if self.header.mode == fmt.MODE_REALIZABLE or chi == 0:
            return chi
        d = self.slope_rank[cb] - self.slope_rank[ca]
        return chi if d > 0 else -chi

    def query_traced(self, a, b, c):
        n = self.header.n
        for x in (a, b, c):
            if not 0 <= x < n:
                raise IndexOutOfRange(f"index {x} outside 0..{n - 1}")
        trace = QueryTrace()
        ca, cb, cc = self.dup[a], self.dup[b], self.dup[c]
        if ca == cb or ca == cc or cb == cc:
            trace.terminal = "answered-on"
            return 0, trace
        if self.header.n_levels == 0:
            trace.steps.append((0, 0, None, "leaf"))
            trace.terminal = "leaf-table"
            chi = self._leaf_chi(0, ca, cb, cc)
            return self._chi_to_answer(chi, ca, cb), trace

        depth, index = 0, 0
        sa, sb, sc = ca, cb, cc
        while True:
            sub, shared = self.locate_intersection(depth, index, sa, sb)
            rec = self.cell(depth, index)
            codes, interesting = self.signature(depth, index, sc)
            code = codes[sub]
            dim = rec.dims[sub]
            if code == ABOVE:
                trace.steps.append((depth, index, sub, "above"))
                trace.terminal = "answered-above"
                return self._translate(-1, ca, cb), trace
            if code == BELOW:
                trace.steps.append((depth, index, sub, "below"))
                trace.terminal = "answered-below"
                return self._translate(1, ca, cb), trace
            if code == CONTAINS:
                trace.steps.append((depth, index, sub, "contains"))
                trace.terminal = "answered-on"
                return 0, trace
            # code == CROSSES
            if dim == 1:
                idx_c, direction = interesting[sub][1:]
                trace.steps.append((depth, index, sub, "crosses-1d"))
                if idx_c == shared:
                    trace.terminal = "answered-on"
                    return 0, trace
                v = 1 if (shared < idx_c) == (direction == 1) else -1
                trace.terminal = "answered-above" if v < 0 else "answered-below"
                return self._translate(v, ca, cb), trace
            if dim == 0:
                raise MalformedEncoding("crosses code on a vertex cell")
            # descend into the dim-2 subcell
            kind = rec.kinds[sub]
            ref = rec.refs[sub]
            _, int_a = self.signature(depth, index, sa)
            _, int_b = self.signature(depth, index, sb)
            sa = int_a[sub][1]
            sb = int_b[sub][1]
            sc = interesting[sub][1]
            trace.steps.append((depth, index, sub, "descend"))
            if kind == 2:
                trace.terminal = "leaf-table"
                chi = self._leaf_chi(ref, sa, sb, sc)
                return self._chi_to_answer(chi, ca, cb), trace
            if kind != 1:
                raise MalformedEncoding("descent into a terminal subcell")
            depth += 1
            index = ref
            if depth > self.header.n_levels:
                raise MalformedEncoding("descent past the last level")

    def query(self, a, b, c):
        return self.query_traced(a, b, c)[0]

    # ---------------- stats ----------------

    def stats(self):
        off = self.header.offsets
        total = len(self.data)
        ends = list(off[1:]) + [total]
        names = ["slope_order", "dup_map", "directory", "signatures",
                 "leaf_directory", "tables"]
        sections = {"header": fmt.HEADER_BYTES * 8}
        for name, start, end in zip(names, off, ends):
            sections[name] = (end - start) * 8
        per_level = {}
        cells_per_level = {}
        for depth, level in enumerate(self.levels):
            bits = 0
            for i in range(level.count):
                rec = self.cell(depth, i)
                bits += rec.m * rec.zeta
            per_level[depth] = bits
            cells_per_level[depth] = level.count
        n = self.header.n
        bits_total = total * 8
        distinct = len(set(self.leaf_ptr)) if self.leaf_ptr else 0
        return {
            "bits_total": bits_total,
            "bytes_total": total,
            "sections": sections,
            "signature_bits_per_level": per_level,
            "internal_cells_per_level": cells_per_level,
            "n": n,
            "n_curves": self.n_curves,
            "r": self.header.r,
            "t": self.header.t,
            "levels": self.header.n_levels,
            "leaves": len(self.leaf_m),
            "distinct_tables": distinct,
            "bits_per_n2": bits_total / (n * n) if n else 0.0,
            "bits_per_nlogn": (bits_total / (n * max(1.0, math.log2(n)))
                               if n else 0.0),
        }
