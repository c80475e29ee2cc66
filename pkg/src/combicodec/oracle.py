"""Brute-force ground truth for small instances.

Exhaustively enumerates objects and evaluates each model's closed-form
joint probability, then checks that the factorized per-step product used
by the codecs reproduces it exactly.  All comparisons are exact rational
equality; nothing here is approximate.  Shipped with the library (not
test-only) so the CLI selftest can run it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Dict, Iterator, List, Sequence, Tuple

from gmpy2 import mpq

from .codecs import CodingContext, exact_probability, model_probability
from .errors import BudgetError
from .models import Multiset, multiset_count, permutation_count

MAX_OBJECTS = 10**5


@dataclass(frozen=True)
class EnumerationBudget:
    max_alphabet: int = 3
    max_n: int = 5
    max_objects: int = field(default=MAX_OBJECTS)

    def check_sizes(self, alphabet_size: int, n: int) -> None:
        if alphabet_size > self.max_alphabet or n > self.max_n:
            raise BudgetError(
                f"instance ({alphabet_size} symbols, size {n}) exceeds the "
                f"budget ({self.max_alphabet}, {self.max_n})"
            )

    def check_count(self, count) -> None:
        if count > self.max_objects:
            raise BudgetError(f"{count} objects exceed the cap of {self.max_objects}")


def enumerate_multisets(
    symbols: Sequence[str] | int,
    n: int,
    budget: EnumerationBudget = EnumerationBudget(),
) -> List[Multiset]:
    """All distinct size-n multisets over the symbols, in lexicographic
    order of their count vectors.  An integer stands for that many
    generic symbols s0, s1, ..."""
    if isinstance(symbols, int):
        symbols = tuple(f"s{i}" for i in range(symbols))
    budget.check_count(multiset_count(max(len(symbols), 1), n))
    out: List[Multiset] = []

    def rec(i: int, remaining: int, counts: Dict[str, int]) -> None:
        if i == len(symbols) - 1:
            counts[symbols[i]] = remaining
            out.append(Multiset(counts))
            return
        for c in range(remaining + 1):
            rec(i + 1, remaining - c, {**counts, symbols[i]: c})

    if len(symbols) == 0:
        if n == 0:
            return [Multiset()]
        raise BudgetError("no multisets of positive size over an empty symbol set")
    rec(0, n, {})
    return out


def enumerate_permutations(
    m: Multiset, budget: EnumerationBudget = EnumerationBudget()
) -> List[Tuple[str, ...]]:
    """All distinct arrangements of the multiset."""
    budget.check_count(permutation_count(m))
    out: List[Tuple[str, ...]] = []

    def rec(left: Dict[str, int], remaining: int, prefix: Tuple[str, ...]) -> None:
        if remaining == 0:
            out.append(prefix)
            return
        for sym in left:
            if left[sym] > 0:
                left[sym] -= 1
                rec(left, remaining - 1, prefix + (sym,))
                left[sym] += 1

    rec(dict(m.counts), m.size, ())
    return out


def _enumerate_prefixes(
    m: Multiset, k: int, budget: EnumerationBudget
) -> List[Tuple[str, ...]]:
    """All distinct length-k draws without replacement from m."""
    out: List[Tuple[str, ...]] = []

    def rec(left: Dict[str, int], remaining: int, prefix: Tuple[str, ...]) -> None:
        if remaining == 0:
            out.append(prefix)
            budget.check_count(len(out))
            return
        for sym in left:
            if left[sym] > 0:
                left[sym] -= 1
                rec(left, remaining - 1, prefix + (sym,))
                left[sym] += 1

    rec(dict(m.counts), k, ())
    return out


def _enumerate_submultisets(
    m: Multiset, k: int, budget: EnumerationBudget
) -> List[Multiset]:
    syms = list(m.counts)
    out: List[Multiset] = []

    def rec(i: int, remaining: int, counts: Dict[str, int]) -> None:
        if i == len(syms):
            if remaining == 0:
                out.append(Multiset(counts))
                budget.check_count(len(out))
            return
        for c in range(min(m.counts[syms[i]], remaining) + 1):
            rec(i + 1, remaining - c, {**counts, syms[i]: c})

    rec(0, k, {})
    return out


def enumerate_objects(
    ctx: CodingContext, budget: EnumerationBudget = EnumerationBudget()
) -> Iterator:
    """Every object the model can assign probability to, exactly once."""
    size = ctx.size
    if ctx.given_multiset is not None:
        size = max(size, ctx.given_multiset.size)
    budget.check_sizes(len(ctx.alphabet), size)
    syms = ctx.alphabet.symbols
    if ctx.model in ("seq", "adaptive_seq"):
        budget.check_count(len(syms) ** ctx.n)
        return iter(product(syms, repeat=ctx.n))
    if ctx.model in ("multiset", "uniform_ms", "adaptive_ms"):
        return iter(enumerate_multisets(syms, ctx.n, budget))
    if ctx.model == "perm":
        return iter(enumerate_permutations(ctx.given_multiset, budget))
    if ctx.model == "trunc_perm":
        return iter(_enumerate_prefixes(ctx.given_multiset, ctx.k, budget))
    if ctx.model == "comb":
        return iter(_enumerate_submultisets(ctx.given_multiset, ctx.k, budget))
    raise ValueError(f"unknown model {ctx.model!r}")


def joint_probability(model: str, ctx: CodingContext, obj) -> mpq:
    """Closed-form joint probability of the object under the model."""
    if ctx.model != model:
        raise ValueError(f"context is for model {ctx.model!r}")
    return exact_probability(ctx, obj)


@dataclass
class FactorizationReport:
    model: str
    objects: int
    total: mpq
    mismatches: List[Tuple[object, mpq, mpq]]

    @property
    def ok(self) -> bool:
        return self.total == 1 and not self.mismatches

    def render(self) -> str:
        status = "ok" if self.ok else "FAILED"
        lines = [
            f"{self.model}: {status} ({self.objects} objects, "
            f"sum of joints = {self.total})"
        ]
        for obj, joint, prod in self.mismatches:
            lines.append(f"  mismatch for {obj!r}: joint={joint} product={prod}")
        return "\n".join(lines)


def check_factorization(
    model: str,
    ctx: CodingContext,
    budget: EnumerationBudget = EnumerationBudget(),
) -> FactorizationReport:
    """For every enumerable object, compare the chained step-distribution
    product against the closed-form joint, and check the joints sum to 1."""
    total = mpq(0)
    mismatches = []
    count = 0
    for obj in enumerate_objects(ctx, budget):
        count += 1
        joint = joint_probability(model, ctx, obj)
        total += joint
        if joint > 0:
            prod = model_probability(ctx, obj)
            if prod != joint:
                mismatches.append((obj, joint, prod))
    return FactorizationReport(model, count, total, mismatches)
