"""Bit-level I/O over byte buffers.

Payload bits are packed MSB-first within each byte; the final partial
byte is zero-padded.  Readers may be pulled past the declared end of the
stream, in which case they return zero bits: the range coder legitimately
peeks ahead of the payload, and zero padding is what the encoder's flush
assumed.
"""

from __future__ import annotations


class BitWriter:
    """Accumulates bits MSB-first into a byte buffer."""

    def __init__(self) -> None:
        self._buf = bytearray()
        self._acc = 0
        self._nacc = 0
        self.bit_count = 0

    def write_bit(self, bit: int) -> None:
        self._acc = (self._acc << 1) | (bit & 1)
        self._nacc += 1
        self.bit_count += 1
        if self._nacc == 8:
            self._buf.append(self._acc)
            self._acc = 0
            self._nacc = 0

    def getvalue(self) -> bytes:
        """Return the packed bytes, zero-padding any trailing partial byte."""
        out = bytearray(self._buf)
        if self._nacc:
            out.append(self._acc << (8 - self._nacc))
        return bytes(out)


class BitReader:
    """Reads bits MSB-first from a byte buffer.

    `nbits` bounds the number of meaningful bits; reads beyond it yield 0.
    """

    def __init__(self, data: bytes, nbits: int | None = None) -> None:
        if nbits is None:
            nbits = 8 * len(data)
        if nbits > 8 * len(data):
            raise ValueError("declared bit length exceeds the buffer")
        self._data = data
        self._nbits = nbits
        self._pos = 0

    def read_bit(self) -> int:
        if self._pos >= self._nbits:
            return 0
        byte = self._data[self._pos >> 3]
        bit = (byte >> (7 - (self._pos & 7))) & 1
        self._pos += 1
        return bit
