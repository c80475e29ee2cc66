"""Integer arithmetic (range) coder and the deterministic discretizer.

The coder operates purely on `FrequencyTable`s: integer counts summing to
a power of two.  Models hand the coder exact rational distributions which
`discretize` turns into tables; because the discretization rule is a pure
function of the input distribution, encoder and decoder always agree on
the tables without any side channel.

Internal registers are 64 bits wide with bit-aligned renormalization.
For any run of (table, index) coding steps the emitted length L satisfies

    L <= sum(log2(table.total / table.counts[index])) + 2

up to a per-step rounding term below 2**-28 bits.
"""

from __future__ import annotations

import heapq
from bisect import bisect_right
from typing import Sequence

import gmpy2
from gmpy2 import mpq

from .bitio import BitReader, BitWriter
from .errors import CodingError, ValidationError

_PRECISION = 64
_MASK = (1 << _PRECISION) - 1
_HALF = 1 << (_PRECISION - 1)
_QUARTER = 1 << (_PRECISION - 2)
_THREE_QUARTERS = 3 << (_PRECISION - 2)

MAX_FREQ_BITS = 32
DEFAULT_FREQ_BITS = 32


class FrequencyTable:
    """Immutable integer discretization of a distribution at resolution 2**f."""

    __slots__ = ("counts", "total", "freq_bits", "_cum")

    def __init__(self, counts: Sequence[int], freq_bits: int):
        if not 1 <= freq_bits <= MAX_FREQ_BITS:
            raise ValidationError(f"freq_bits must be in [1, {MAX_FREQ_BITS}]")
        total = 1 << freq_bits
        counts = tuple(int(c) for c in counts)
        if any(c < 0 for c in counts):
            raise ValidationError("negative count in frequency table")
        if sum(counts) != total:
            raise ValidationError("frequency table counts must sum to 2**f")
        cum = [0] * (len(counts) + 1)
        acc = 0
        for i, c in enumerate(counts):
            acc += c
            cum[i + 1] = acc
        self.counts = counts
        self.total = total
        self.freq_bits = freq_bits
        self._cum = cum

    def __len__(self) -> int:
        return len(self.counts)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FrequencyTable)
            and self.counts == other.counts
            and self.freq_bits == other.freq_bits
        )

    def __repr__(self) -> str:
        return f"FrequencyTable({list(self.counts)}, freq_bits={self.freq_bits})"


def discretize_ratio(
    nums: Sequence[int], den: int, freq_bits: int = DEFAULT_FREQ_BITS
) -> FrequencyTable:
    """Discretize probabilities given as integer numerators over a shared
    denominator (the internal hot-path form of `discretize`).

    Rule (fixed so the two endpoints can never disagree):
      1. every outcome gets floor(p * 2**f) counts;
      2. the shortfall is handed out one count at a time to outcomes in
         decreasing order of fractional remainder, ties to the lower index;
      3. any outcome with p > 0 left at zero takes one count from the
         currently largest outcome (lowest index among maxima).
    """
    if not 1 <= freq_bits <= MAX_FREQ_BITS:
        raise ValidationError(f"freq_bits must be in [1, {MAX_FREQ_BITS}]")
    if any(n < 0 for n in nums) or den <= 0:
        raise ValidationError("negative probability")
    if sum(nums) != den:
        raise ValidationError("probabilities must sum to exactly 1")
    total = 1 << freq_bits
    n_positive = sum(1 for n in nums if n > 0)
    if n_positive == 0:
        raise ValidationError("at least one probability must be positive")
    if n_positive > total:
        raise ValidationError(
            f"resolution 2**{freq_bits} too small for {n_positive} outcomes"
        )

    counts = []
    remainders = []
    shortfall = total
    for i, num in enumerate(nums):
        floor, rem = divmod(num * total, den)
        floor = int(floor)
        counts.append(floor)
        shortfall -= floor
        if rem > 0:
            remainders.append((rem, i))
    # remainders sum to the shortfall and each is < 1 unit, so a single
    # pass over the sorted remainders always suffices
    remainders.sort(key=lambda t: (-t[0], t[1]))
    for _, i in remainders[:shortfall]:
        counts[i] += 1
    starved = [i for i, num in enumerate(nums) if num > 0 and counts[i] == 0]
    if starved:
        # steal one count per starved outcome from the currently largest
        # outcome (lowest index among maxima); lazy max-heap, entries are
        # refreshed when they surface stale
        heap = [(-c, j) for j, c in enumerate(counts) if c > 0]
        heapq.heapify(heap)
        for i in starved:
            while -heap[0][0] != counts[heap[0][1]]:
                c, j = heap[0]
                heapq.heapreplace(heap, (-counts[j], j))
            j = heap[0][1]
            counts[j] -= 1
            heapq.heapreplace(heap, (-counts[j], j))
            counts[i] += 1
            heapq.heappush(heap, (-1, i))
    return FrequencyTable(counts, freq_bits)


def discretize(probs, freq_bits: int = DEFAULT_FREQ_BITS) -> FrequencyTable:
    """Turn exact rational probabilities into a FrequencyTable.

    See `discretize_ratio` for the (deterministic, pure) rounding rule.
    """
    probs = [mpq(p) for p in probs]
    den = 1
    for p in probs:
        den = gmpy2.lcm(den, p.denominator)
    nums = [int(p.numerator * (den // p.denominator)) for p in probs]
    return discretize_ratio(nums, int(den), freq_bits)


class Encoder:
    """Single-stream arithmetic encoder writing to a BitWriter."""

    def __init__(self, sink: BitWriter | None = None):
        self.sink = sink if sink is not None else BitWriter()
        self._low = 0
        self._high = _MASK
        self._pending = 0
        self._finished = False

    def _emit(self, bit: int) -> None:
        self.sink.write_bit(bit)
        inv = bit ^ 1
        for _ in range(self._pending):
            self.sink.write_bit(inv)
        self._pending = 0

    def encode_symbol(self, table: FrequencyTable, index: int) -> None:
        if self._finished:
            raise CodingError("encoder already finished")
        if not 0 <= index < len(table.counts):
            raise CodingError(f"symbol index {index} out of range")
        if table.counts[index] == 0:
            raise CodingError(
                f"cannot encode outcome {index}: zero count in frequency table"
            )
        low, high = self._low, self._high
        span = high - low + 1
        cum = table._cum
        total = table.total
        high = low + (span * cum[index + 1]) // total - 1
        low = low + (span * cum[index]) // total
        while True:
            if high < _HALF:
                self._emit(0)
            elif low >= _HALF:
                self._emit(1)
                low -= _HALF
                high -= _HALF
            elif low >= _QUARTER and high < _THREE_QUARTERS:
                self._pending += 1
                low -= _QUARTER
                high -= _QUARTER
            else:
                break
            low <<= 1
            high = (high << 1) | 1
        self._low, self._high = low, high

    def finish(self) -> int:
        """Flush the tail bits that pin down the final interval.

        Returns the number of tail bits emitted (at most pending + 2).
        """
        if self._finished:
            raise CodingError("encoder already finished")
        self._finished = True
        before = self.sink.bit_count
        self._pending += 1
        if self._low < _QUARTER:
            self._emit(0)
        else:
            self._emit(1)
        return self.sink.bit_count - before


class Decoder:
    """Mirror of Encoder, reading from a BitReader."""

    def __init__(self, source: BitReader):
        self.source = source
        self._low = 0
        self._high = _MASK
        code = 0
        for _ in range(_PRECISION):
            code = (code << 1) | source.read_bit()
        self._code = code

    def decode_symbol(self, table: FrequencyTable) -> int:
        low, high, code = self._low, self._high, self._code
        span = high - low + 1
        total = table.total
        value = ((code - low + 1) * total - 1) // span
        cum = table._cum
        index = bisect_right(cum, value) - 1
        if index >= len(table.counts) or table.counts[index] == 0:
            raise CodingError("corrupt stream: decoded value outside any outcome")
        high = low + (span * cum[index + 1]) // total - 1
        low = low + (span * cum[index]) // total
        while True:
            if high < _HALF:
                pass
            elif low >= _HALF:
                low -= _HALF
                high -= _HALF
                code -= _HALF
            elif low >= _QUARTER and high < _THREE_QUARTERS:
                low -= _QUARTER
                high -= _QUARTER
                code -= _QUARTER
            else:
                break
            low <<= 1
            high = (high << 1) | 1
            code = (code << 1) | self.source.read_bit()
        self._low, self._high, self._code = low, high, code
        return index
