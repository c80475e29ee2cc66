"""Object codecs: drive the arithmetic coder with exact model distributions.

Eight models are supported, each identified by a short name (and a stable
integer id used in the binary container):

    seq           iid sequence under a known source distribution
    multiset      iid multiset, factorized into binomial count conditionals
    perm          uniformly random arrangement of a given multiset
    trunc_perm    first K draws without replacement from a given multiset
    comb          size-K submultiset drawn from a given multiset
    uniform_ms    multiset uniform over all multisets of a given size
    adaptive_seq  sequence under a symbol distribution learned on the fly
    adaptive_ms   multiset under a learned distribution (Beta-binomial counts)

Every codec walks the same deterministic step schedule on both endpoints,
so the decoder can rebuild each frequency table without side information.
Counts whose value is implied by the context (the final symbol of every
count factorization, and any step whose conditional is a point mass) are
never coded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import gmpy2
from gmpy2 import mpq

from .bitio import BitReader, BitWriter
from .coder import DEFAULT_FREQ_BITS, Decoder, Encoder, discretize_ratio
from .errors import ValidationError
from .models import (
    Alphabet,
    DirichletParams,
    Multiset,
    SourceDistribution,
    adaptive_multiset_step_dist,
    beta_binomial_table,
    binomial,
    binomial_table,
    combination_table,
    dirichlet_predictive_table,
    multiset_count,
    multiset_step_dist,
    permutation_count,
    rising_factorial,
    truncated_perm_prob,
    uniform_multiset_table,
)

MODEL_NAMES = (
    "seq",
    "multiset",
    "perm",
    "trunc_perm",
    "comb",
    "uniform_ms",
    "adaptive_seq",
    "adaptive_ms",
)

_SEQUENCE_MODELS = ("seq", "adaptive_seq", "perm", "trunc_perm")
_MULTISET_MODELS = ("multiset", "uniform_ms", "adaptive_ms", "comb")


@dataclass(frozen=True)
class CodingContext:
    """Everything both endpoints must agree on before any bits flow."""

    alphabet: Alphabet
    model: str
    source: Optional[SourceDistribution] = None
    prior: Optional[DirichletParams] = None
    given_multiset: Optional[Multiset] = None
    n: Optional[int] = None
    k: Optional[int] = None
    freq_bits: int = DEFAULT_FREQ_BITS

    def __post_init__(self):
        if self.model not in MODEL_NAMES:
            raise ValidationError(f"unknown model {self.model!r}")
        required = {
            "seq": ("source", "n"),
            "multiset": ("source", "n"),
            "perm": ("given_multiset",),
            "trunc_perm": ("given_multiset", "k"),
            "comb": ("given_multiset", "k"),
            "uniform_ms": ("n",),
            "adaptive_seq": ("prior", "n"),
            "adaptive_ms": ("prior", "n"),
        }[self.model]
        for name in ("source", "prior", "given_multiset", "n", "k"):
            value = getattr(self, name)
            if name in required and value is None:
                raise ValidationError(f"model {self.model!r} requires {name}")
            if name not in required and value is not None:
                raise ValidationError(f"model {self.model!r} does not take {name}")
        if self.n is not None and self.n < 0:
            raise ValidationError("object size must be non-negative")
        if self.source is not None:
            for sym in self.source.mass:
                self.alphabet.index(sym)
        if self.prior is not None:
            if set(self.prior.alpha) != set(self.alphabet.symbols):
                raise ValidationError(
                    "prior must give a pseudocount to every alphabet symbol"
                )
        if self.given_multiset is not None:
            for sym in self.given_multiset.counts:
                self.alphabet.index(sym)
        if self.k is not None:
            if self.k < 0:
                raise ValidationError("draw size must be non-negative")
            if self.k > self.given_multiset.size:
                raise ValidationError("draw size exceeds the given multiset")

    @property
    def size(self) -> int:
        """Object size: sequence/multiset length, permutation length, or K."""
        if self.model == "perm":
            return self.given_multiset.size
        if self.model in ("trunc_perm", "comb"):
            return self.k
        return self.n


@dataclass(frozen=True)
class EncodedBlob:
    payload: bytes
    bit_length: int

    def __post_init__(self):
        nbytes = len(self.payload)
        if self.bit_length > 8 * nbytes:
            raise ValidationError("bit length exceeds payload")
        if nbytes and self.bit_length <= 8 * (nbytes - 1):
            raise ValidationError("payload has surplus trailing bytes")


# ---------------------------------------------------------------------------
# step walkers
#
# Conditional distributions travel as (nums, den): integer numerators over
# a shared denominator, so no per-outcome rational normalization happens on
# the hot path.  Each encoder walker calls emit(nums, den, index) for every
# coded step; each decoder walker calls pick(nums, den) -> index and
# rebuilds the object.  Steps whose conditional is a point mass are
# resolved without calling emit/pick, identically on both sides.
# ---------------------------------------------------------------------------

Emit = Callable[[Sequence[int], int, int], None]
Pick = Callable[[Sequence[int], int], int]


def _source_ratio(ctx: CodingContext) -> Tuple[List[int], int]:
    nums = [ctx.source.scaled_mass.get(s, 0) for s in ctx.alphabet.symbols]
    return nums, ctx.source.scale


def _encode_seq(ctx: CodingContext, x: Sequence[str], emit: Emit) -> None:
    x = tuple(x)
    if len(x) != ctx.n:
        raise ValidationError(f"sequence has length {len(x)}, context says {ctx.n}")
    nums, den = _source_ratio(ctx)
    for sym in x:
        i = ctx.alphabet.index(sym)
        if nums[i] == 0:
            raise ValidationError(f"symbol {sym!r} has zero probability mass")
        emit(nums, den, i)


def _decode_seq(ctx: CodingContext, pick: Pick) -> Tuple[str, ...]:
    nums, den = _source_ratio(ctx)
    return tuple(ctx.alphabet.symbols[pick(nums, den)] for _ in range(ctx.n))


def _encode_multiset(ctx: CodingContext, m: Multiset, emit: Emit) -> None:
    if m.size != ctx.n:
        raise ValidationError(f"multiset has size {m.size}, context says {ctx.n}")
    for sym in m.counts:
        ctx.alphabet.index(sym)
    syms = ctx.alphabet.symbols
    remaining = ctx.n
    consumed = mpq(0)
    for i, sym in enumerate(syms):
        count = m.count(sym)
        if i == len(syms) - 1:
            break
        trials, theta = multiset_step_dist(ctx.source, ctx.alphabet, i, remaining, consumed)
        if theta == 0:
            if count != 0:
                raise ValidationError(
                    f"symbol {sym!r} occurs {count} times but has zero mass"
                )
        elif theta == 1 or remaining == 0:
            if count != remaining:
                raise ValidationError(
                    f"symbol {sym!r} must take all {remaining} remaining elements"
                )
        else:
            nums, den = binomial_table(trials, theta)
            emit(nums, den, count)
        consumed += ctx.source(sym)
        remaining -= count
    last = syms[-1]
    if m.count(last) != remaining:
        raise ValidationError(f"count of final symbol {last!r} is inconsistent")
    if remaining > 0 and ctx.source(last) == 0:
        raise ValidationError(f"symbol {last!r} occurs but has zero mass")


def _decode_multiset(ctx: CodingContext, pick: Pick) -> Multiset:
    syms = ctx.alphabet.symbols
    remaining = ctx.n
    consumed = mpq(0)
    counts: Dict[str, int] = {}
    for i, sym in enumerate(syms):
        if i == len(syms) - 1:
            counts[sym] = remaining
            break
        trials, theta = multiset_step_dist(ctx.source, ctx.alphabet, i, remaining, consumed)
        if theta == 0:
            count = 0
        elif theta == 1 or remaining == 0:
            count = remaining
        else:
            count = pick(*binomial_table(trials, theta))
        counts[sym] = count
        consumed += ctx.source(sym)
        remaining -= count
    return Multiset(counts)


def _encode_drawn(ctx: CodingContext, x: Sequence[str], length: int, emit: Emit) -> None:
    """Shared by perm (length = M) and trunc_perm (length = K)."""
    x = tuple(x)
    if len(x) != length:
        raise ValidationError(f"expected {length} elements, got {len(x)}")
    m = ctx.given_multiset
    if not m.contains(Multiset.from_elements(x)):
        raise ValidationError("elements are not contained in the given multiset")
    left = dict(m.counts)
    total_left = m.size
    for sym in x:
        i = ctx.alphabet.index(sym)
        if total_left > 1:
            emit([left.get(s, 0) for s in ctx.alphabet.symbols], total_left, i)
        left[sym] = left.get(sym, 0) - 1
        total_left -= 1


def _decode_drawn(ctx: CodingContext, length: int, pick: Pick) -> Tuple[str, ...]:
    m = ctx.given_multiset
    left = dict(m.counts)
    total_left = m.size
    out = []
    for _ in range(length):
        if total_left > 1:
            i = pick([left.get(s, 0) for s in ctx.alphabet.symbols], total_left)
            sym = ctx.alphabet.symbols[i]
        else:
            sym = next(s for s, c in left.items() if c > 0)
        out.append(sym)
        left[sym] -= 1
        total_left -= 1
    return tuple(out)


def _encode_perm(ctx: CodingContext, x: Sequence[str], emit: Emit) -> None:
    if Multiset.from_elements(x) != ctx.given_multiset:
        raise ValidationError("input is not an arrangement of the given multiset")
    _encode_drawn(ctx, x, ctx.given_multiset.size, emit)


def _decode_perm(ctx: CodingContext, pick: Pick) -> Tuple[str, ...]:
    return _decode_drawn(ctx, ctx.given_multiset.size, pick)


def _encode_trunc_perm(ctx: CodingContext, x: Sequence[str], emit: Emit) -> None:
    _encode_drawn(ctx, x, ctx.k, emit)


def _decode_trunc_perm(ctx: CodingContext, pick: Pick) -> Tuple[str, ...]:
    return _decode_drawn(ctx, ctx.k, pick)


def _encode_comb(ctx: CodingContext, c: Multiset, emit: Emit) -> None:
    m = ctx.given_multiset
    if c.size != ctx.k:
        raise ValidationError(f"combination has size {c.size}, context says {ctx.k}")
    if not m.contains(c):
        raise ValidationError("combination is not a submultiset of the given multiset")
    positive = [s for s in ctx.alphabet.symbols if m.count(s) > 0]
    m_left, k_left = m.size, ctx.k
    for j, sym in enumerate(positive):
        m_x = m.count(sym)
        k_x = c.count(sym)
        if j == len(positive) - 1:
            break
        nums, den = combination_table(m_x, m_left, k_left)
        if sum(1 for v in nums if v > 0) > 1:
            emit(nums, den, k_x)
        m_left -= m_x
        k_left -= k_x


def _decode_comb(ctx: CodingContext, pick: Pick) -> Multiset:
    m = ctx.given_multiset
    positive = [s for s in ctx.alphabet.symbols if m.count(s) > 0]
    m_left, k_left = m.size, ctx.k
    counts: Dict[str, int] = {}
    for j, sym in enumerate(positive):
        m_x = m.count(sym)
        if j == len(positive) - 1:
            counts[sym] = k_left
            break
        nums, den = combination_table(m_x, m_left, k_left)
        if sum(1 for v in nums if v > 0) > 1:
            k_x = pick(nums, den)
        else:
            k_x = next(k for k, v in enumerate(nums) if v > 0)
        counts[sym] = k_x
        m_left -= m_x
        k_left -= k_x
    return Multiset(counts)


def _encode_uniform_ms(ctx: CodingContext, m: Multiset, emit: Emit) -> None:
    if m.size != ctx.n:
        raise ValidationError(f"multiset has size {m.size}, context says {ctx.n}")
    for sym in m.counts:
        ctx.alphabet.index(sym)
    syms = ctx.alphabet.symbols
    remaining = ctx.n
    for i, sym in enumerate(syms):
        count = m.count(sym)
        if i == len(syms) - 1:
            break
        if remaining > 0:
            nums, den = uniform_multiset_table(len(syms) - i, remaining)
            emit(nums, den, count)
        remaining -= count
    if m.count(syms[-1]) != remaining:
        raise ValidationError("count of final symbol is inconsistent")


def _decode_uniform_ms(ctx: CodingContext, pick: Pick) -> Multiset:
    syms = ctx.alphabet.symbols
    remaining = ctx.n
    counts: Dict[str, int] = {}
    for i, sym in enumerate(syms):
        if i == len(syms) - 1:
            counts[sym] = remaining
            break
        if remaining > 0:
            counts[sym] = pick(*uniform_multiset_table(len(syms) - i, remaining))
        else:
            counts[sym] = 0
        remaining -= counts[sym]
    return Multiset(counts)


def _encode_adaptive_seq(ctx: CodingContext, x: Sequence[str], emit: Emit) -> None:
    x = tuple(x)
    if len(x) != ctx.n:
        raise ValidationError(f"sequence has length {len(x)}, context says {ctx.n}")
    history: Dict[str, int] = {}
    for step, sym in enumerate(x):
        i = ctx.alphabet.index(sym)
        nums, den = dirichlet_predictive_table(ctx.prior, ctx.alphabet, history, step)
        emit(nums, den, i)
        history[sym] = history.get(sym, 0) + 1


def _decode_adaptive_seq(ctx: CodingContext, pick: Pick) -> Tuple[str, ...]:
    history: Dict[str, int] = {}
    out = []
    for step in range(ctx.n):
        nums, den = dirichlet_predictive_table(ctx.prior, ctx.alphabet, history, step)
        sym = ctx.alphabet.symbols[pick(nums, den)]
        out.append(sym)
        history[sym] = history.get(sym, 0) + 1
    return tuple(out)


def _encode_adaptive_ms(ctx: CodingContext, m: Multiset, emit: Emit) -> None:
    if m.size != ctx.n:
        raise ValidationError(f"multiset has size {m.size}, context says {ctx.n}")
    for sym in m.counts:
        ctx.alphabet.index(sym)
    syms = ctx.alphabet.symbols
    remaining = ctx.n
    consumed = mpq(0)
    for i, sym in enumerate(syms):
        count = m.count(sym)
        if i == len(syms) - 1:
            break
        trials, a, b = adaptive_multiset_step_dist(
            ctx.prior, ctx.alphabet, i, remaining, consumed
        )
        if remaining > 0:
            nums, den = beta_binomial_table(trials, a, b)
            emit(nums, den, count)
        consumed += a
        remaining -= count
    if m.count(syms[-1]) != remaining:
        raise ValidationError("count of final symbol is inconsistent")


def _decode_adaptive_ms(ctx: CodingContext, pick: Pick) -> Multiset:
    syms = ctx.alphabet.symbols
    remaining = ctx.n
    consumed = mpq(0)
    counts: Dict[str, int] = {}
    for i, sym in enumerate(syms):
        if i == len(syms) - 1:
            counts[sym] = remaining
            break
        trials, a, b = adaptive_multiset_step_dist(
            ctx.prior, ctx.alphabet, i, remaining, consumed
        )
        counts[sym] = pick(*beta_binomial_table(trials, a, b)) if remaining > 0 else 0
        consumed += a
        remaining -= counts[sym]
    return Multiset(counts)


_ENCODE_WALKERS = {
    "seq": _encode_seq,
    "multiset": _encode_multiset,
    "perm": _encode_perm,
    "trunc_perm": _encode_trunc_perm,
    "comb": _encode_comb,
    "uniform_ms": _encode_uniform_ms,
    "adaptive_seq": _encode_adaptive_seq,
    "adaptive_ms": _encode_adaptive_ms,
}

_DECODE_WALKERS = {
    "seq": _decode_seq,
    "multiset": _decode_multiset,
    "perm": _decode_perm,
    "trunc_perm": _decode_trunc_perm,
    "comb": _decode_comb,
    "uniform_ms": _decode_uniform_ms,
    "adaptive_seq": _decode_adaptive_seq,
    "adaptive_ms": _decode_adaptive_ms,
}


# ---------------------------------------------------------------------------
# public codec surface
# ---------------------------------------------------------------------------


def encode(ctx: CodingContext, obj) -> EncodedBlob:
    writer = BitWriter()
    encoder = Encoder(writer)
    tables = {}

    def emit(nums, den, index: int) -> None:
        # walkers that reuse a distribution pass the same nums object, so
        # the table only has to be discretized once (keyed by identity)
        key = id(nums)
        cached = tables.get(key)
        if cached is None or cached[0] is not nums:
            cached = (nums, discretize_ratio(nums, den, ctx.freq_bits))
            tables[key] = cached
        encoder.encode_symbol(cached[1], index)

    _ENCODE_WALKERS[ctx.model](ctx, obj, emit)
    encoder.finish()
    return EncodedBlob(writer.getvalue(), writer.bit_count)


def decode(ctx: CodingContext, blob: EncodedBlob):
    reader = BitReader(blob.payload, blob.bit_length)
    decoder = Decoder(reader)
    tables = {}

    def pick(nums, den) -> int:
        key = id(nums)
        cached = tables.get(key)
        if cached is None or cached[0] is not nums:
            cached = (nums, discretize_ratio(nums, den, ctx.freq_bits))
            tables[key] = cached
        return decoder.decode_symbol(cached[1])

    return _DECODE_WALKERS[ctx.model](ctx, pick)


def model_probability(ctx: CodingContext, obj) -> mpq:
    """Exact object probability as the product of the coded conditionals.

    This follows the same factorized walk as the encoder (point-mass steps
    contribute factor 1); the closed-form joints live alongside the ic_*
    functions below and in `oracle`.
    """
    acc_num, acc_den = 1, 1

    def emit(nums, den, index: int) -> None:
        nonlocal acc_num, acc_den
        acc_num *= nums[index]
        acc_den *= den

    _ENCODE_WALKERS[ctx.model](ctx, obj, emit)
    return mpq(acc_num, acc_den)


# ---------------------------------------------------------------------------
# split / join
# ---------------------------------------------------------------------------


def split_sequence(x: Sequence[str]) -> Tuple[Multiset, Tuple[str, ...]]:
    """A sequence carries exactly a histogram plus an arrangement of it."""
    x = tuple(x)
    return Multiset.from_elements(x), x


def join(m: Multiset, ordering: Sequence[str]) -> Tuple[str, ...]:
    ordering = tuple(ordering)
    if Multiset.from_elements(ordering) != m:
        raise ValidationError("ordering does not match the multiset histogram")
    return ordering


# ---------------------------------------------------------------------------
# information content (closed forms, exact rationals, high-precision log)
# ---------------------------------------------------------------------------


def _neg_log2(p: mpq) -> float:
    if p <= 0:
        raise ValidationError("object has zero probability: infinite content")
    return math.log2(int(p.denominator)) - math.log2(int(p.numerator))


def _check(ctx: CodingContext, model: str) -> None:
    if ctx.model != model:
        raise ValidationError(f"context is for model {ctx.model!r}, not {model!r}")


def sequence_probability(ctx: CodingContext, x: Sequence[str]) -> mpq:
    _check(ctx, "seq")
    x = tuple(x)
    if len(x) != ctx.n:
        raise ValidationError("sequence length does not match context")
    p = mpq(1)
    for sym in x:
        ctx.alphabet.index(sym)
        p *= ctx.source(sym)
    return p


def multiset_probability(ctx: CodingContext, m: Multiset) -> mpq:
    _check(ctx, "multiset")
    if m.size != ctx.n:
        raise ValidationError("multiset size does not match context")
    p = mpq(gmpy2.fac(ctx.n))
    for sym, c in m.counts.items():
        ctx.alphabet.index(sym)
        p *= ctx.source(sym) ** c / gmpy2.fac(c)
    return p


def permutation_probability(ctx: CodingContext, x: Sequence[str]) -> mpq:
    _check(ctx, "perm")
    if Multiset.from_elements(x) != ctx.given_multiset:
        raise ValidationError("input is not an arrangement of the given multiset")
    return mpq(1, permutation_count(ctx.given_multiset))


def trunc_perm_probability(ctx: CodingContext, x: Sequence[str]) -> mpq:
    _check(ctx, "trunc_perm")
    if len(x) != ctx.k:
        raise ValidationError("prefix length does not match context")
    return truncated_perm_prob(ctx.given_multiset, x)


def combination_probability(ctx: CodingContext, c: Multiset) -> mpq:
    _check(ctx, "comb")
    m = ctx.given_multiset
    if c.size != ctx.k:
        raise ValidationError("combination size does not match context")
    if not m.contains(c):
        raise ValidationError("combination is not a submultiset of the given multiset")
    p = mpq(1, binomial(m.size, ctx.k))
    for sym, k_x in c.counts.items():
        p *= binomial(m.count(sym), k_x)
    return p


def uniform_multiset_probability(ctx: CodingContext, m: Multiset) -> mpq:
    _check(ctx, "uniform_ms")
    if m.size != ctx.n:
        raise ValidationError("multiset size does not match context")
    for sym in m.counts:
        ctx.alphabet.index(sym)
    return mpq(1, multiset_count(len(ctx.alphabet), ctx.n))


def adaptive_sequence_probability(ctx: CodingContext, x: Sequence[str]) -> mpq:
    _check(ctx, "adaptive_seq")
    x = tuple(x)
    if len(x) != ctx.n:
        raise ValidationError("sequence length does not match context")
    m = Multiset.from_elements(x)
    p = mpq(1) / rising_factorial(ctx.prior.total, ctx.n)
    for sym, c in m.counts.items():
        p *= rising_factorial(ctx.prior(sym), c)
    return p


def adaptive_multiset_probability(ctx: CodingContext, m: Multiset) -> mpq:
    _check(ctx, "adaptive_ms")
    if m.size != ctx.n:
        raise ValidationError("multiset size does not match context")
    p = mpq(permutation_count(m)) / rising_factorial(ctx.prior.total, ctx.n)
    for sym, c in m.counts.items():
        p *= rising_factorial(ctx.prior(sym), c)
    return p


_PROBABILITY = {
    "seq": sequence_probability,
    "multiset": multiset_probability,
    "perm": permutation_probability,
    "trunc_perm": trunc_perm_probability,
    "comb": combination_probability,
    "uniform_ms": uniform_multiset_probability,
    "adaptive_seq": adaptive_sequence_probability,
    "adaptive_ms": adaptive_multiset_probability,
}


def exact_probability(ctx: CodingContext, obj) -> mpq:
    """Closed-form model probability of an object (not the factorized walk)."""
    return _PROBABILITY[ctx.model](ctx, obj)


def information_content(ctx: CodingContext, obj) -> float:
    """Shannon information content in bits: -log2 of the model probability."""
    return _neg_log2(exact_probability(ctx, obj))


def ic_sequence(ctx, x):
    return _neg_log2(sequence_probability(ctx, x))


def ic_multiset(ctx, m):
    return _neg_log2(multiset_probability(ctx, m))


def ic_permutation(ctx, x):
    return _neg_log2(permutation_probability(ctx, x))


def ic_trunc_permutation(ctx, x):
    return _neg_log2(trunc_perm_probability(ctx, x))


def ic_combination(ctx, c):
    return _neg_log2(combination_probability(ctx, c))


def ic_uniform_multiset(ctx, m):
    return _neg_log2(uniform_multiset_probability(ctx, m))


def ic_adaptive_sequence(ctx, x):
    return _neg_log2(adaptive_sequence_probability(ctx, x))


def ic_adaptive_multiset(ctx, m):
    return _neg_log2(adaptive_multiset_probability(ctx, m))
