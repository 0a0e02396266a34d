"""Binary layout of the encoding.

All multi-byte header integers are little-endian; bit streams inside
sections are packed least-significant-bit first and each section is padded
to a byte boundary.

    [magic "OTE1" 4B][version u16][mode u8][reserved u8]
    [n u64][r u64][t u64][levels u64]
    [section offsets, 6 x u64: slope-order, dup-map, directory,
     signatures, leaf directory, tables]

Sections:
  slope-order     [n_curves u64] then n_curves ranks, rank_width bits each
  dup-map         n entries, rank_width bits each (point id -> curve id)
  directory       per level: [count u32][desc_bits u48][w_ref u8]
                  [w_sig_base u8][w_m u8][w_k u8][w_zeta u8][w_desc_base u8],
                  then count fixed records [sig_base w_sig_base][m w_m]
                  [K w_k][zeta w_zeta][w_slot u4][w_idx u4]
                  [desc_base w_desc_base], then the level's descriptor
                  stream of exactly desc_bits: per subcell [dim 2b][kind 2b]
                  plus [ref w_ref] only when kind is nonzero; kind:
                  0 terminal, 1 internal, 2 leaf; desc_base is an absolute
                  bit offset within the section; zeta is the cell's
                  signature stride and w_slot/w_idx its payload field widths
  signatures      per level, per internal cell, per crossing curve in slot
                  order: one signature of exactly zeta(level) bits; entries
                  per subcell: [code 2b] then for code=crosses
                  dim2: [slot w_slot][idx w_idx][idx w_idx],
                  dim1: [idx w_idx][dir 1b]
  leaf directory  [n_leaves u64][psi u8] then per leaf [m leaf_m_width]
                  [table pointer psi bits] (bit offset into tables)
  tables          deduplicated payloads, 2 bits per triple of the leaf's
                  curves in lexicographic slot order; sign codes 0=zero,
                  1=positive, 2=negative

Signature field widths at depth d descend from the crossing bound of the
children, B = floor(n_curves / r^(d+1)): w_idx = ceil_log2(2B + 2),
w_slot = max(1, ceil_log2(B + 1)).
"""

from __future__ import annotations

from math import comb

MAGIC = b"OTE1"
VERSION = 1
MODE_REALIZABLE = 0
MODE_ABSTRACT = 1

HEADER_BYTES = 4 + 2 + 1 + 1 + 4 * 8 + 6 * 8

SIG_ZERO = 0
SIG_POSITIVE = 1
SIG_NEGATIVE = 2

SIGN_TO_CODE = {0: SIG_ZERO, 1: SIG_POSITIVE, -1: SIG_NEGATIVE}
CODE_TO_SIGN = {SIG_ZERO: 0, SIG_POSITIVE: 1, SIG_NEGATIVE: -1}

WIDTH_BITS = 4
LEVEL_HEADER_BITS = 32 + 48 + 6 * 8


def cell_record_bits(w_sig_base, w_m, w_k, w_zeta, w_desc_base):
    return w_sig_base + w_m + w_k + w_zeta + 2 * WIDTH_BITS + w_desc_base


def ceil_log2(x):
    return max(0, int(x - 1).bit_length())


def child_bound(n_curves, r, t, depth):
    """Crossing bound for cells at depth+1 (unrefined cells may carry up to
    the leaf threshold past the floor bound)."""
    return max(n_curves // r ** (depth + 1), t)


def idx_width(n_curves, r, t, depth):
    return max(1, ceil_log2(2 * child_bound(n_curves, r, t, depth) + 2))


def slot_width(n_curves, r, t, depth):
    return max(1, ceil_log2(child_bound(n_curves, r, t, depth) + 1))


def rank_width(n_curves):
    return max(1, ceil_log2(max(n_curves, 1)))


def leaf_m_width(n_curves, t, n_levels):
    top = n_curves if n_levels == 0 else t
    return max(1, ceil_log2(top + 1))


def triple_rank(m, i, j, k):
    """Lexicographic rank of the sorted triple (i, j, k) among all sorted
    triples of range(m)."""
    assert 0 <= i < j < k < m
    return (comb(m, 3) - comb(m - i, 3)
            + comb(m - 1 - i, 2) - comb(m - j, 2)
            + (k - j - 1))
