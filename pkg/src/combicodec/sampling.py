"""Seeded random instance generation for the selftest and the test suite.

Generation only has to produce *valid* (context, object) pairs, so plain
floating-point sampling is fine here; the codecs themselves never see a
float.
"""

from __future__ import annotations

import random
from typing import Tuple

from gmpy2 import mpq

from .codecs import MODEL_NAMES, CodingContext
from .models import Alphabet, DirichletParams, Multiset, SourceDistribution


def _symbols(k: int):
    return tuple(f"s{i}" for i in range(k))


def _random_weights(rng: random.Random, k: int, allow_zero: bool = True):
    weights = [rng.randint(1, 99) for _ in range(k)]
    if allow_zero and k > 1 and rng.random() < 0.25:
        for i in rng.sample(range(k), rng.randint(1, k - 1)):
            weights[i] = 0
    return weights


def _polya_draws(rng: random.Random, alpha, syms, n: int):
    weights = [float(a) for a in alpha]
    out = []
    for _ in range(n):
        (sym,) = rng.choices(syms, weights=weights)
        out.append(sym)
        weights[syms.index(sym)] += 1.0
    return out


def _uniform_multiset(rng: random.Random, syms, n: int) -> Multiset:
    """Uniform over size-n multisets via a random stars-and-bars layout."""
    k = len(syms)
    if k == 1:
        return Multiset({syms[0]: n})
    bars = sorted(rng.sample(range(n + k - 1), k - 1))
    counts = {}
    prev = -1
    for i, b in enumerate(bars):
        counts[syms[i]] = b - prev - 1
        prev = b
    counts[syms[-1]] = n + k - 2 - prev
    return Multiset(counts)


def random_instance(
    rng: random.Random,
    model: str,
    max_alphabet: int = 64,
    max_n: int = 200,
    freq_bits: int = 32,
) -> Tuple[CodingContext, object]:
    """Draw a valid (context, object) pair for the given model."""
    if model not in MODEL_NAMES:
        raise ValueError(f"unknown model {model!r}")
    k_alpha = rng.randint(1, max_alphabet)
    syms = _symbols(k_alpha)
    alphabet = Alphabet(syms)
    n = rng.randint(0, max_n)

    if model in ("seq", "multiset"):
        weights = _random_weights(rng, k_alpha)
        source = SourceDistribution.from_weights(dict(zip(syms, weights)))
        support = [s for s, w in zip(syms, weights) if w > 0]
        wpos = [w for w in weights if w > 0]
        draws = rng.choices(support, weights=wpos, k=n) if n else []
        ctx = CodingContext(alphabet, model, source=source, n=n, freq_bits=freq_bits)
        obj = tuple(draws) if model == "seq" else Multiset.from_elements(draws)
        return ctx, obj

    if model in ("perm", "trunc_perm", "comb"):
        m_elems = rng.choices(syms, k=max(n, 1))
        given = Multiset.from_elements(m_elems)
        pool = list(m_elems)
        rng.shuffle(pool)
        if model == "perm":
            ctx = CodingContext(alphabet, model, given_multiset=given, freq_bits=freq_bits)
            return ctx, tuple(pool)
        k = rng.randint(0, given.size)
        ctx = CodingContext(
            alphabet, model, given_multiset=given, k=k, freq_bits=freq_bits
        )
        drawn = pool[:k]
        return ctx, (tuple(drawn) if model == "trunc_perm" else Multiset.from_elements(drawn))

    if model == "uniform_ms":
        ctx = CodingContext(alphabet, model, n=n, freq_bits=freq_bits)
        return ctx, _uniform_multiset(rng, syms, n)

    # adaptive models
    alpha = {s: mpq(rng.randint(1, 8), rng.randint(1, 4)) for s in syms}
    prior = DirichletParams(alpha)
    draws = _polya_draws(rng, [alpha[s] for s in syms], list(syms), n)
    ctx = CodingContext(alphabet, model, prior=prior, n=n, freq_bits=freq_bits)
    if model == "adaptive_seq":
        return ctx, tuple(draws)
    return ctx, Multiset.from_elements(draws)
