"""LSB-first bit packing over bytes."""

from __future__ import annotations

_FLUSH_BITS = 4096


class BitWriter:
    def __init__(self):
        self.buf = bytearray()
        self.acc = 0
        self.bits = 0        # bits currently held in acc

    @property
    def nbits(self):
        return 8 * len(self.buf) + self.bits

    def write(self, value, width):
        assert 0 <= value < (1 << width), (value, width)
        self.acc |= value << self.bits
        self.bits += width
        if self.bits >= _FLUSH_BITS:
            self._spill()

    def write_packed(self, acc, nbits):
        self.acc |= acc << self.bits
        self.bits += nbits
        if self.bits >= _FLUSH_BITS:
            self._spill()

    def _spill(self):
        nbytes = self.bits // 8
        self.buf += (self.acc & ((1 << (8 * nbytes)) - 1)).to_bytes(nbytes, "little")
        self.acc >>= 8 * nbytes
        self.bits -= 8 * nbytes

    def getvalue(self):
        pad = (-self.bits) % 8
        self.bits += pad
        self._spill()
        assert self.bits == 0
        self.acc = 0
        return bytes(self.buf)


class BitReader:
    """Reads LSB-first bit fields from a bytes object."""

    def __init__(self, data, bit_offset=0):
        self.data = data
        self.pos = bit_offset

    def seek(self, bit_offset):
        self.pos = bit_offset

    def read(self, width):
        end = self.pos + width
        if end > 8 * len(self.data):
            raise EOFError("bit read past end of data")
        lo_byte, hi_byte = self.pos // 8, (end + 7) // 8
        chunk = int.from_bytes(self.data[lo_byte:hi_byte], "little")
        value = (chunk >> (self.pos - 8 * lo_byte)) & ((1 << width) - 1)
        self.pos = end
        return value
