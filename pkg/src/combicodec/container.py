"""Binary container for encoded objects.

Layout (all multi-byte integers are unsigned LEB128 varints):

    magic        4 bytes, b"CMB1"
    model_id     1 byte (index into MODEL_NAMES)
    n            varint, object/multiset size
    k            varint, only for trunc_perm and comb
    checksum     4 bytes, truncated SHA-256 of the canonical context text
    bit_length   varint
    payload      ceil(bit_length / 8) bytes

The coding context itself (alphabet, distribution, pseudocounts, given
multiset, frequency resolution) is never stored: both endpoints must
already hold it, and the checksum detects when they disagree.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Tuple

from .codecs import MODEL_NAMES, CodingContext, EncodedBlob
from .errors import ContainerError

MAGIC = b"CMB1"


def write_varint(value: int) -> bytes:
    if value < 0:
        raise ValueError("varints are unsigned")
    out = bytearray()
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return bytes(out)


def read_varint(data: bytes, pos: int) -> Tuple[int, int]:
    value = 0
    shift = 0
    while True:
        if pos >= len(data):
            raise ContainerError("truncated varint")
        byte = data[pos]
        pos += 1
        value |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return value, pos
        shift += 7
        if shift > 63:
            raise ContainerError("varint too long")


def context_checksum(ctx: CodingContext) -> bytes:
    """First 4 bytes of SHA-256 over a canonical context serialization."""
    lines = [f"model={ctx.model}", f"freq_bits={ctx.freq_bits}"]
    lines.append("alphabet=" + "\x00".join(ctx.alphabet.symbols))
    if ctx.source is not None:
        lines.append(
            "source="
            + ",".join(f"{s}\x00{ctx.source(s)}" for s in ctx.alphabet.symbols)
        )
    if ctx.prior is not None:
        lines.append(
            "prior=" + ",".join(f"{s}\x00{ctx.prior(s)}" for s in ctx.alphabet.symbols)
        )
    if ctx.given_multiset is not None:
        lines.append(
            "given="
            + ",".join(
                f"{s}\x00{ctx.given_multiset.count(s)}" for s in ctx.alphabet.symbols
            )
        )
    return hashlib.sha256("\n".join(lines).encode("utf-8")).digest()[:4]


@dataclass(frozen=True)
class Container:
    model: str
    n: int
    k: int | None
    checksum: bytes
    blob: EncodedBlob

    def to_bytes(self) -> bytes:
        out = bytearray(MAGIC)
        out.append(MODEL_NAMES.index(self.model))
        out += write_varint(self.n)
        if self.model in ("trunc_perm", "comb"):
            out += write_varint(self.k)
        out += self.checksum
        out += write_varint(self.blob.bit_length)
        out += self.blob.payload
        return bytes(out)

    @classmethod
    def from_bytes(cls, data: bytes) -> "Container":
        if len(data) < 5:
            raise ContainerError("truncated container header")
        if data[:4] != MAGIC:
            raise ContainerError("bad magic: not a combicodec container")
        model_id = data[4]
        if model_id >= len(MODEL_NAMES):
            raise ContainerError(f"unknown model id {model_id}")
        model = MODEL_NAMES[model_id]
        n, pos = read_varint(data, 5)
        k = None
        if model in ("trunc_perm", "comb"):
            k, pos = read_varint(data, pos)
        if pos + 4 > len(data):
            raise ContainerError("truncated container header")
        checksum = data[pos : pos + 4]
        bit_length, pos = read_varint(data, pos + 4)
        payload = data[pos:]
        expected = (bit_length + 7) // 8
        if len(payload) < expected:
            raise ContainerError("truncated payload")
        if len(payload) > expected:
            raise ContainerError("trailing garbage after payload")
        return cls(model, n, k, checksum, EncodedBlob(payload, bit_length))

    def check_context(self, ctx: CodingContext) -> None:
        if ctx.model != self.model:
            raise ContainerError(
                f"model mismatch: container holds {self.model!r}, "
                f"context is {ctx.model!r}"
            )
        if context_checksum(ctx) != self.checksum:
            raise ContainerError("context mismatch: checksum does not agree")


def pack(ctx: CodingContext, blob: EncodedBlob) -> Container:
    return Container(
        model=ctx.model,
        n=ctx.size if ctx.model not in ("trunc_perm", "comb") else ctx.given_multiset.size,
        k=ctx.k,
        checksum=context_checksum(ctx),
        blob=blob,
    )
