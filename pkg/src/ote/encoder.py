"""Serialize a cutting hierarchy into the self-contained encoding bytes.

The encoding alone answers every orientation query; coordinates are not
stored. See formats.py for the exact layout.
"""

from __future__ import annotations

import math
import struct

from .bitio import BitWriter
from .curves import crossing, dualize, validate_arrangement
from .cutting import build_cutting
from .exact import dedupe_points, integer_shear, sign
from . import formats as fmt


def default_r():
    return 4


def default_t(n, mode):
    """Leaf threshold: log n / log log n for point inputs, sqrt(log n) for
    wiring inputs."""
    if n < 5:
        return 3
    lg = math.log2(n)
    if mode == fmt.MODE_REALIZABLE:
        v = lg / math.log2(lg) if lg > 1 else 1
    else:
        v = math.sqrt(lg)
    return max(3, int(v))


def encode_points(points, r=None, t=None, seed=0, sample_factor=0.5):
    """Encode the order type of a planar point set (exact coordinates)."""
    if not points:
        raise ValueError("empty point set")
    reps, dup_map = dedupe_points(points)
    sheared, _ = integer_shear(reps)
    curves = [dualize(p, id=i) for i, p in enumerate(sheared)]
    order = sorted(range(len(curves)), key=lambda i: curves[i].a)
    slope_rank = [0] * len(curves)
    for rank, i in enumerate(order):
        slope_rank[i] = rank
    return _encode(curves, fmt.MODE_REALIZABLE, slope_rank, dup_map,
                   len(points), r, t, seed, sample_factor)


def encode_curves(curves, mode, r=None, t=None, seed=0, sample_factor=0.5,
                  validate=True):
    """Encode an arrangement given directly as curves (abstract mode uses
    the identity slope order and duplicate map)."""
    if validate:
        validate_arrangement(curves)
    n = len(curves)
    return _encode(curves, mode, list(range(n)), list(range(n)), n, r, t,
                   seed, sample_factor)


def _encode(curves, mode, slope_rank, dup_map, n_input, r, t, seed,
            sample_factor):
    n_curves = len(curves)
    if r is None:
        r = default_r()
    if t is None:
        t = default_t(n_curves, mode)
    h = build_cutting(curves, r=r, t=t, seed=seed, sample_factor=sample_factor)
    return serialize(h, mode, slope_rank, dup_map, n_input)


def chirotope_value(curves, slope_rank, ga, gb, gc):
    """Alternating chirotope of three distinct curves: the vertical relation
    of crossing(a, b) versus c, times the slope-order swap sign."""
    ca, cb, cc = curves[ga], curves[gb], curves[gc]
    q = crossing(ca, cb)
    v = sign(q[1] - cc.y_at(q[0]))
    return v * sign(slope_rank[gb] - slope_rank[ga])


def _leaf_payload(h, slope_rank, leaf):
    ids = leaf.crossers
    m = len(ids)
    acc = 0
    nb = 0
    for i in range(m):
        for j in range(i + 1, m):
            for k in range(j + 1, m):
                chi = chirotope_value(h.curves, slope_rank, ids[i], ids[j],
                                      ids[k])
                acc |= fmt.SIGN_TO_CODE[chi] << nb
                nb += 2
    return acc, nb


def serialize(h, mode, slope_rank, dup_map, n_input):
    n_curves = h.n
    n_levels = len(h.levels)
    w_rank = fmt.rank_width(n_curves)

    sec_slope = BitWriter()
    sec_slope.write(n_curves, 64)
    for rank in slope_rank:
        sec_slope.write(rank, w_rank)

    sec_dup = BitWriter()
    for ci in dup_map:
        sec_dup.write(ci, w_rank)

    # signatures first: the directory needs each cell's bit base
    sec_sig = BitWriter()
    cell_zetas = []         # per level: list of per-cell strides
    sig_bases = []          # per level: list of bit offsets
    for level in h.levels:
        zetas = []
        bases = []
        for node in level:
            zeta = max((nb for _, nb in node.sigs), default=0)
            base = sec_sig.nbits
            zetas.append(zeta)
            bases.append(base)
            for slot, (acc, nb) in enumerate(node.sigs):
                # arithmetic addressing self-check: the write position is
                # exactly base + slot*zeta
                assert sec_sig.nbits == base + slot * zeta
                sec_sig.write_packed(acc, nb)
                sec_sig.write(0, zeta - nb)
        cell_zetas.append(zetas)
        sig_bases.append(bases)

    sec_dir = BitWriter()
    for depth, level in enumerate(h.levels):
        next_count = len(h.levels[depth + 1]) if depth + 1 < len(h.levels) else 0
        w_ref = max(1, fmt.ceil_log2(max(next_count, len(h.leaves)) + 1))
        desc_sizes = [
            sum(4 + (w_ref if child.kind != "term" else 0)
                for child in node.children)
            for node in level]
        desc_bits = sum(desc_sizes)

        def width_for(v):
            return max(1, int(v).bit_length())

        w_sig_base = width_for(max(sig_bases[depth], default=0))
        w_m = width_for(max(len(node.crossers) for node in level))
        w_k = width_for(max(len(node.children) for node in level))
        w_zeta = width_for(max(cell_zetas[depth], default=0))
        # upper bound on the largest descriptor offset fixes its own width
        bound = (sec_dir.nbits + fmt.LEVEL_HEADER_BITS
                 + len(level) * 200 + desc_bits)
        w_desc_base = width_for(bound)
        rec_bits = fmt.cell_record_bits(w_sig_base, w_m, w_k, w_zeta,
                                        w_desc_base)
        assert rec_bits <= 200

        sec_dir.write(len(level), 32)
        sec_dir.write(desc_bits, 48)
        sec_dir.write(w_ref, 8)
        for w in (w_sig_base, w_m, w_k, w_zeta, w_desc_base):
            sec_dir.write(w, 8)
        desc_base = sec_dir.nbits + len(level) * rec_bits
        for node, dsize in zip(level, desc_sizes):
            sec_dir.write(sig_bases[depth][node.index], w_sig_base)
            sec_dir.write(len(node.crossers), w_m)
            sec_dir.write(len(node.children), w_k)
            sec_dir.write(cell_zetas[depth][node.index], w_zeta)
            sec_dir.write(node.w_slot, fmt.WIDTH_BITS)
            sec_dir.write(node.w_idx, fmt.WIDTH_BITS)
            sec_dir.write(desc_base, w_desc_base)
            desc_base += dsize
        for node in level:
            for child in node.children:
                sec_dir.write(child.cell.dim, 2)
                if child.kind == "internal":
                    sec_dir.write(1, 2)
                    sec_dir.write(child.index, w_ref)
                elif child.kind == "leaf":
                    sec_dir.write(2, 2)
                    sec_dir.write(child.index, w_ref)
                else:
                    sec_dir.write(0, 2)

    # leaf tables, deduplicated by payload
    sec_tab = BitWriter()
    table_at = {}
    pointers = []
    for leaf in h.leaves:
        acc, nb = _leaf_payload(h, slope_rank, leaf)
        key = (nb, acc)
        off = table_at.get(key)
        if off is None:
            off = sec_tab.nbits
            table_at[key] = off
            sec_tab.write_packed(acc, nb)
        pointers.append(off)

    psi = max(1, sec_tab.nbits.bit_length())
    w_m = fmt.leaf_m_width(n_curves, h.t, n_levels)
    sec_leaf = BitWriter()
    sec_leaf.write(len(h.leaves), 64)
    sec_leaf.write(psi, 8)
    for leaf, ptr in zip(h.leaves, pointers):
        sec_leaf.write(len(leaf.crossers), w_m)
        sec_leaf.write(ptr, psi)

    sections = [sec_slope, sec_dup, sec_dir, sec_sig, sec_leaf, sec_tab]
    blobs = [s.getvalue() for s in sections]
    offsets = []
    pos = fmt.HEADER_BYTES
    for b in blobs:
        offsets.append(pos)
        pos += len(b)

    header = bytearray()
    header += fmt.MAGIC
    header += struct.pack("<HBB", fmt.VERSION, mode, 0)
    header += struct.pack("<QQQQ", n_input, h.r, h.t, n_levels)
    header += struct.pack("<6Q", *offsets)
    assert len(header) == fmt.HEADER_BYTES
    return bytes(header) + b"".join(blobs)
