"""Exact rational probability models for combinatorial objects.

Everything here is computed with arbitrary-precision integers and
rationals (gmpy2); no floating point enters any model probability.  The
factorized per-step conditionals defined here are what the object codecs
feed to the arithmetic coder; the matching closed-form joints live in
`oracle` so the two routes stay independent.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

import gmpy2
from gmpy2 import mpq, mpz

from .errors import ValidationError

Rational = mpq
Symbol = str


def rational(value) -> mpq:
    """Coerce ints, Fractions, mpq, or 'p/q' strings to an exact rational."""
    if isinstance(value, str):
        return mpq(value)
    return mpq(value)


class Alphabet:
    """Ordered finite symbol set; list order defines the total order used
    by every count factorization."""

    __slots__ = ("symbols", "_index")

    def __init__(self, symbols: Iterable[Symbol]):
        symbols = tuple(symbols)
        if len(symbols) == 0:
            raise ValidationError("alphabet must contain at least one symbol")
        if len(set(symbols)) != len(symbols):
            raise ValidationError("alphabet contains duplicate symbols")
        self.symbols = symbols
        self._index = {s: i for i, s in enumerate(symbols)}

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, symbol: Symbol) -> bool:
        return symbol in self._index

    def __iter__(self):
        return iter(self.symbols)

    def __eq__(self, other) -> bool:
        return isinstance(other, Alphabet) and self.symbols == other.symbols

    def index(self, symbol: Symbol) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise ValidationError(f"symbol {symbol!r} not in alphabet") from None

    def __repr__(self) -> str:
        return f"Alphabet({list(self.symbols)!r})"


class Multiset:
    """Histogram of symbol occurrence counts."""

    __slots__ = ("counts", "size")

    def __init__(self, counts: Mapping[Symbol, int] | None = None):
        cleaned: Dict[Symbol, int] = {}
        for sym, c in (counts or {}).items():
            c = int(c)
            if c < 0:
                raise ValidationError(f"negative count for symbol {sym!r}")
            if c > 0:
                cleaned[sym] = c
        self.counts = cleaned
        self.size = sum(cleaned.values())

    @classmethod
    def from_elements(cls, elements: Iterable[Symbol]) -> "Multiset":
        counts: Dict[Symbol, int] = {}
        for sym in elements:
            counts[sym] = counts.get(sym, 0) + 1
        return cls(counts)

    def count(self, symbol: Symbol) -> int:
        return self.counts.get(symbol, 0)

    def contains(self, other: "Multiset") -> bool:
        """Componentwise: other[x] <= self[x] for every symbol."""
        return all(self.count(s) >= c for s, c in other.counts.items())

    def elements(self, alphabet: Alphabet) -> List[Symbol]:
        """Elements repeated in alphabet order (the canonical text form)."""
        return [s for s in alphabet.symbols for _ in range(self.count(s))]

    def __eq__(self, other) -> bool:
        return isinstance(other, Multiset) and self.counts == other.counts

    def __hash__(self) -> int:
        return hash(frozenset(self.counts.items()))

    def __repr__(self) -> str:
        return f"Multiset({self.counts!r})"


class SourceDistribution:
    """Exact rational probability mass per symbol.

    `scale` is the lcm of the mass denominators and `scaled_mass` the
    masses times `scale` as plain integers (summing to `scale`)."""

    __slots__ = ("mass", "scale", "scaled_mass")

    def __init__(self, mass: Mapping[Symbol, object]):
        self.mass = {s: rational(p) for s, p in mass.items()}
        if any(p < 0 for p in self.mass.values()):
            raise ValidationError("negative probability mass")
        if sum(self.mass.values()) != 1:
            raise ValidationError("source distribution must sum to exactly 1")
        scale = mpz(1)
        for p in self.mass.values():
            scale = gmpy2.lcm(scale, p.denominator)
        self.scale = int(scale)
        self.scaled_mass = {
            s: int(p.numerator * (scale // p.denominator))
            for s, p in self.mass.items()
        }

    @classmethod
    def from_weights(cls, weights: Mapping[Symbol, int]) -> "SourceDistribution":
        total = sum(weights.values())
        if total <= 0:
            raise ValidationError("weights must sum to a positive value")
        return cls({s: mpq(w, total) for s, w in weights.items()})

    @classmethod
    def uniform(cls, alphabet: Alphabet) -> "SourceDistribution":
        k = len(alphabet)
        return cls({s: mpq(1, k) for s in alphabet.symbols})

    def __call__(self, symbol: Symbol) -> mpq:
        return self.mass.get(symbol, mpq(0))


class DirichletParams:
    """Positive rational pseudocounts, one per symbol.

    `scale` is the lcm of the pseudocount denominators; `scaled_alpha` and
    `scaled_total` are the pseudocounts times `scale`, as plain integers,
    so predictive distributions can be built without rational arithmetic.
    """

    __slots__ = ("alpha", "total", "scale", "scaled_alpha", "scaled_total")

    def __init__(self, alpha: Mapping[Symbol, object]):
        self.alpha = {s: rational(a) for s, a in alpha.items()}
        if any(a <= 0 for a in self.alpha.values()):
            raise ValidationError("pseudocounts must be strictly positive")
        self.total = sum(self.alpha.values())
        scale = mpz(1)
        for a in self.alpha.values():
            scale = gmpy2.lcm(scale, a.denominator)
        self.scale = scale
        self.scaled_alpha = {
            s: int(a.numerator * (scale // a.denominator))
            for s, a in self.alpha.items()
        }
        self.scaled_total = sum(self.scaled_alpha.values())

    @classmethod
    def uniform(cls, alphabet: Alphabet, value=1) -> "DirichletParams":
        return cls({s: rational(value) for s in alphabet.symbols})

    def __call__(self, symbol: Symbol) -> mpq:
        try:
            return self.alpha[symbol]
        except KeyError:
            raise ValidationError(f"no pseudocount for symbol {symbol!r}") from None


# counting functions


def binomial(n: int, k: int) -> mpz:
    if k < 0 or k > n:
        return mpz(0)
    return gmpy2.bincoef(n, k)


def rising_factorial(a, n: int) -> mpq:
    """a (a+1) ... (a+n-1); equals the ratio Gamma(a+n)/Gamma(a)."""
    a = rational(a)
    out = mpq(1)
    for i in range(n):
        out *= a + i
    return out


def multiset_count(alphabet_size: int, n: int) -> mpz:
    """Number of size-n multisets over alphabet_size distinct symbols."""
    if alphabet_size < 0 or n < 0:
        raise ValidationError("sizes must be non-negative")
    if alphabet_size == 0:
        if n > 0:
            raise ValidationError("no multisets of positive size over 0 symbols")
        return mpz(1)
    return binomial(n + alphabet_size - 1, alphabet_size - 1)


def permutation_count(m: Multiset) -> mpz:
    """Number of distinct arrangements of the multiset."""
    out = gmpy2.fac(m.size)
    for c in m.counts.values():
        out //= gmpy2.fac(c)
    return out


# per-step conditional distributions


def binomial_pmf(k: int, trials: int, theta) -> mpq:
    theta = rational(theta)
    if not 0 <= k <= trials:
        raise ValidationError(f"count {k} outside [0, {trials}]")
    if not 0 <= theta <= 1:
        raise ValidationError("theta must be in [0, 1]")
    return mpq(binomial(trials, k)) * theta**k * (1 - theta) ** (trials - k)


def beta_binomial_pmf(k: int, trials: int, alpha, beta) -> mpq:
    alpha, beta = rational(alpha), rational(beta)
    if alpha <= 0 or beta <= 0:
        raise ValidationError("alpha and beta must be strictly positive")
    if not 0 <= k <= trials:
        raise ValidationError(f"count {k} outside [0, {trials}]")
    return (
        mpq(binomial(trials, k))
        * rising_factorial(alpha, k)
        * rising_factorial(beta, trials - k)
        / rising_factorial(alpha + beta, trials)
    )


RatioDist = Tuple[List[int], int]  # integer numerators over a shared denominator


def binomial_table(trials: int, theta) -> RatioDist:
    """Full pmf over k = 0..trials as (numerators, shared denominator),
    built by an exact integer ratio recurrence."""
    theta = rational(theta)
    if not 0 <= theta <= 1:
        raise ValidationError("theta must be in [0, 1]")
    if trials == 0:
        return [1], 1
    a, ab = theta.numerator, theta.denominator
    b = ab - a
    if a == 0:
        return [1] + [0] * trials, 1
    if b == 0:
        return [0] * trials + [1], 1
    den = mpz(ab) ** trials
    num = mpz(b) ** trials  # k = 0 numerator
    out = [num]
    for k in range(trials):
        num = num * ((trials - k) * a) // ((k + 1) * b)
        out.append(num)
    return out, den


def beta_binomial_table(trials: int, alpha, beta) -> RatioDist:
    """Full Beta-binomial pmf over k = 0..trials as an integer ratio form.

    With alpha = p/q and beta = r/s, every term C(K,k) * rising(alpha,k)
    * rising(beta,K-k) / rising(alpha+beta,K) scales to integers over the
    shared denominator prod_i (p*s + r*q + i*q*s).
    """
    alpha, beta = rational(alpha), rational(beta)
    if alpha <= 0 or beta <= 0:
        raise ValidationError("alpha and beta must be strictly positive")
    if trials == 0:
        return [1], 1
    p, q = alpha.numerator, alpha.denominator
    r, s = beta.numerator, beta.denominator
    qs = q * s
    base = p * s + r * q
    den = mpz(1)
    for i in range(trials):
        den *= base + i * qs
    # k = 0: rising(beta, K) * q**K, expressed over den
    num = mpz(q) ** trials
    for i in range(trials):
        num *= r + i * s
    out = [num]
    for k in range(trials):
        num = num * ((trials - k) * (p + k * q) * s) // (
            (k + 1) * (r + (trials - k - 1) * s) * q
        )
        out.append(num)
    return out, den


def permutation_step_dist(m: Multiset, drawn: Multiset) -> Dict[Symbol, mpq]:
    """Distribution of the next element drawn without replacement from m."""
    if not m.contains(drawn):
        raise ValidationError("drawn elements exceed the available multiset")
    remaining = m.size - drawn.size
    if remaining <= 0:
        raise ValidationError("no elements left to draw")
    out = {}
    for sym, c in m.counts.items():
        left = c - drawn.count(sym)
        if left > 0:
            out[sym] = mpq(left, remaining)
    return out


def multiset_step_dist(
    d: SourceDistribution,
    alphabet: Alphabet,
    position: int,
    remaining_n: int,
    consumed_mass,
) -> Tuple[int, mpq]:
    """Binomial parameters (trials, theta) for the count of the symbol at
    `position` in alphabet order, given the counts of all earlier symbols."""
    consumed_mass = rational(consumed_mass)
    if remaining_n < 0:
        raise ValidationError("remaining size must be non-negative")
    if consumed_mass >= 1:
        if remaining_n > 0:
            raise ValidationError("all mass consumed but elements remain")
        return remaining_n, mpq(0)
    sym = alphabet.symbols[position]
    theta = d(sym) / (1 - consumed_mass)
    return remaining_n, theta


def combination_table(m_x: int, m_size: int, k_size: int) -> RatioDist:
    """Hypergeometric pmf over k = 0..min(m_x, k_size) in ratio form."""
    if k_size > m_size:
        raise ValidationError("cannot draw more elements than available")
    if not 0 <= m_x <= m_size:
        raise ValidationError("symbol count outside the multiset")
    den = binomial(m_size, k_size)
    nums = [
        binomial(m_size - m_x, k_size - k) * binomial(m_x, k)
        for k in range(min(m_x, k_size) + 1)
    ]
    return nums, den


def combination_step_dist(m_x: int, m_size: int, k_size: int) -> Dict[int, mpq]:
    """Hypergeometric distribution of how many of the k_size draws from a
    size-m_size multiset hit a symbol occurring m_x times."""
    nums, den = combination_table(m_x, m_size, k_size)
    return {k: mpq(num, den) for k, num in enumerate(nums) if num > 0}


def dirichlet_predictive_table(
    params: DirichletParams,
    alphabet: Alphabet,
    history_counts: Mapping[Symbol, int],
    history_size: int,
) -> RatioDist:
    """Posterior predictive over alphabet order in scaled-integer form."""
    scale = params.scale
    nums = [
        params.scaled_alpha[s] + history_counts.get(s, 0) * scale
        for s in alphabet.symbols
    ]
    return nums, params.scaled_total + history_size * scale


def dirichlet_predictive(
    params: DirichletParams, history: Multiset
) -> Dict[Symbol, mpq]:
    """Posterior predictive symbol distribution given observed counts."""
    denom = params.total + history.size
    return {
        sym: (a + history.count(sym)) / denom for sym, a in params.alpha.items()
    }


def adaptive_multiset_step_dist(
    params: DirichletParams,
    alphabet: Alphabet,
    position: int,
    remaining_n: int,
    consumed_alpha,
) -> Tuple[int, mpq, mpq]:
    """Beta-binomial parameters (trials, alpha, beta) for the count of the
    symbol at `position`, with beta the pseudocount mass of later symbols."""
    consumed_alpha = rational(consumed_alpha)
    if remaining_n < 0:
        raise ValidationError("remaining size must be non-negative")
    sym = alphabet.symbols[position]
    a = params(sym)
    beta = params.total - consumed_alpha - a
    if beta <= 0 and position != len(alphabet) - 1:
        raise ValidationError("non-final symbol with no pseudocount mass left")
    return remaining_n, a, beta


def uniform_multiset_table(remaining_symbols: int, remaining_n: int) -> RatioDist:
    """Uniform-multiset count pmf over k = 0..remaining_n in ratio form."""
    if remaining_symbols < 1:
        if remaining_n > 0:
            raise ValidationError("no symbols left for a non-empty multiset")
        return [1], 1
    den = multiset_count(remaining_symbols, remaining_n)
    nums = [
        multiset_count(remaining_symbols - 1, remaining_n - k)
        if remaining_symbols > 1 or remaining_n - k == 0
        else mpz(0)
        for k in range(remaining_n + 1)
    ]
    return nums, den


def uniform_multiset_step_dist(
    remaining_symbols: int, remaining_n: int
) -> Dict[int, mpq]:
    """Count distribution for the next symbol when every size-n multiset over
    the remaining symbols is equally likely."""
    nums, den = uniform_multiset_table(remaining_symbols, remaining_n)
    return {k: mpq(num, den) for k, num in enumerate(nums) if num > 0}


def truncated_perm_prob(m: Multiset, prefix: Sequence[Symbol]) -> mpq:
    """Probability of drawing `prefix` when sampling without replacement."""
    drawn = Multiset.from_elements(prefix)
    if not m.contains(drawn):
        raise ValidationError("prefix is not contained in the multiset")
    num = mpz(1)
    for sym, k in drawn.counts.items():
        c = m.count(sym)
        num *= gmpy2.fac(c) // gmpy2.fac(c - k)
    k = len(prefix)
    return mpq(num * gmpy2.fac(m.size - k), gmpy2.fac(m.size))
