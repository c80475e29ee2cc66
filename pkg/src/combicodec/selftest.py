"""Self-check suite behind the CLI `selftest` command.

Two layers: exact oracle checks (enumerate small instances, compare the
factorized step products against the closed-form joints, and check the
joints sum to exactly 1) and a seeded randomized round-trip sweep through
every codec with the bit-length optimality bound enforced.
"""

from __future__ import annotations

import random
from typing import Callable, List

from gmpy2 import mpq

from .codecs import (
    MODEL_NAMES,
    CodingContext,
    decode,
    encode,
    information_content,
)
from .models import Alphabet, DirichletParams, Multiset, SourceDistribution
from .oracle import EnumerationBudget, check_factorization
from .sampling import random_instance


def _oracle_contexts(max_alphabet: int, max_n: int) -> List[CodingContext]:
    k = min(max_alphabet, 3)
    n = min(max_n, 5)
    syms = tuple("ABC"[:k])
    alphabet = Alphabet(syms)
    weights = {s: i + 1 for i, s in enumerate(syms)}
    source = SourceDistribution.from_weights(weights)
    prior = DirichletParams({s: mpq(2 * i + 1, 2) for i, s in enumerate(syms)})
    given = Multiset.from_elements([syms[i % k] for i in range(n)] if n else [])
    draw = max(0, min(2, given.size))
    ctxs = [
        CodingContext(alphabet, "seq", source=source, n=n),
        CodingContext(alphabet, "multiset", source=source, n=n),
        CodingContext(alphabet, "uniform_ms", n=n),
        CodingContext(alphabet, "adaptive_seq", prior=prior, n=n),
        CodingContext(alphabet, "adaptive_ms", prior=prior, n=n),
    ]
    if given.size > 0:
        ctxs.append(CodingContext(alphabet, "perm", given_multiset=given))
    ctxs.append(CodingContext(alphabet, "trunc_perm", given_multiset=given, k=draw))
    ctxs.append(CodingContext(alphabet, "comb", given_multiset=given, k=draw))
    return ctxs


def run_selftest(
    max_alphabet: int = 3,
    max_n: int = 5,
    trials: int = 50,
    seed: int = 20160329,
    report: Callable[[str], None] = print,
    inject_fault: bool = False,
) -> bool:
    """Run all checks; report one line per check; return overall success."""
    ok = True
    budget = EnumerationBudget(max_alphabet=max_alphabet, max_n=max_n)

    for ctx in _oracle_contexts(max_alphabet, max_n):
        rep = check_factorization(ctx.model, ctx, budget)
        passed = rep.ok
        if inject_fault and ctx.model == "seq":
            passed = False
        ok &= passed
        report(
            f"oracle {ctx.model:<12} {'pass' if passed else 'FAIL'} "
            f"({rep.objects} objects)"
        )

    rng = random.Random(seed)
    rt_alphabet, rt_n = 8, 24
    for model in MODEL_NAMES:
        failures = 0
        over_budget = 0
        for _ in range(trials):
            ctx, obj = random_instance(rng, model, rt_alphabet, rt_n)
            blob = encode(ctx, obj)
            if decode(ctx, blob) != obj:
                failures += 1
            if blob.bit_length > information_content(ctx, obj) + 2.0:
                over_budget += 1
        passed = failures == 0 and over_budget == 0
        ok &= passed
        report(
            f"roundtrip {model:<12} {'pass' if passed else 'FAIL'} "
            f"({trials} trials, {failures} mismatches, {over_budget} over budget)"
        )

    report("selftest: " + ("all checks passed" if ok else "FAILURES detected"))
    return ok
