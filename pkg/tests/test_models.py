"""Model-layer tests.

Expected values that are not immediate from the definitions are recomputed
here by brute-force enumeration, so the model code is checked against an
independent oracle rather than against itself.
"""

import itertools
from collections import Counter

import pytest
from gmpy2 import mpq

from combicodec.errors import ValidationError
from combicodec.models import (
    Alphabet,
    DirichletParams,
    Multiset,
    SourceDistribution,
    adaptive_multiset_step_dist,
    beta_binomial_pmf,
    beta_binomial_table,
    binomial_pmf,
    binomial_table,
    combination_step_dist,
    dirichlet_predictive,
    multiset_count,
    multiset_step_dist,
    permutation_count,
    permutation_step_dist,
    rising_factorial,
    truncated_perm_prob,
    uniform_multiset_step_dist,
)

AB = Alphabet(("A", "B"))
ABC = Alphabet(("A", "B", "C"))


def brute_binomial(k, trials, theta):
    """P(k successes) by summing over all 2^trials outcomes."""
    total = mpq(0)
    for outcome in itertools.product((0, 1), repeat=trials):
        if sum(outcome) == k:
            p = mpq(1)
            for bit in outcome:
                p *= theta if bit else 1 - theta
            total += p
    return total


class TestBinomial:
    def test_fair_coin(self):
        assert binomial_pmf(1, 2, mpq(1, 2)) == mpq(1, 2)

    def test_empty(self):
        assert binomial_pmf(0, 5, mpq(0)) == 1

    def test_third(self):
        assert binomial_pmf(2, 3, mpq(1, 3)) == mpq(2, 9)

    @pytest.mark.parametrize("theta", [mpq(0), mpq(1, 3), mpq(4, 7), mpq(1)])
    def test_against_enumeration(self, theta):
        for trials in range(0, 6):
            for k in range(trials + 1):
                assert binomial_pmf(k, trials, theta) == brute_binomial(
                    k, trials, theta
                )

    @pytest.mark.parametrize("theta", [mpq(0), mpq(1), mpq(2, 5)])
    def test_table_matches_pmf(self, theta):
        nums, den = binomial_table(7, theta)
        assert sum(nums) == den
        for k, num in enumerate(nums):
            assert mpq(num, den) == binomial_pmf(k, 7, theta)


class TestBetaBinomial:
    def test_uniform_prior_is_uniform(self):
        # alpha = beta = 1 makes every count equally likely
        for trials in range(0, 8):
            for k in range(trials + 1):
                assert beta_binomial_pmf(k, trials, 1, 1) == mpq(1, trials + 1)

    def test_empty(self):
        assert beta_binomial_pmf(0, 0, mpq(3, 2), 4) == 1

    def test_single_trial(self):
        assert beta_binomial_pmf(1, 1, 2, mpq(5, 2)) == mpq(4, 9)

    def test_reduces_to_polya_urn(self):
        # with integer pseudocounts the model is a Polya urn, which we can
        # simulate exactly by enumerating draw orders
        alpha, beta, trials = 2, 3, 4
        totals = Counter()
        probs = {}
        for outcome in itertools.product((0, 1), repeat=trials):
            p, a, b = mpq(1), alpha, beta
            for bit in outcome:
                p *= mpq(a if bit else b, a + b)
                if bit:
                    a += 1
                else:
                    b += 1
            probs[outcome] = p
        for outcome, p in probs.items():
            totals[sum(outcome)] += p
        for k in range(trials + 1):
            assert beta_binomial_pmf(k, trials, alpha, beta) == totals[k]

    def test_table_matches_pmf(self):
        a, b = mpq(1, 2), mpq(7, 3)
        nums, den = beta_binomial_table(6, a, b)
        assert sum(nums) == den
        for k, num in enumerate(nums):
            assert mpq(num, den) == beta_binomial_pmf(k, 6, a, b)

    def test_rejects_nonpositive_params(self):
        with pytest.raises(ValidationError):
            beta_binomial_pmf(0, 1, 0, 1)


class TestCounting:
    def test_multiset_count_small(self):
        # oracle: count distinct sorted tuples directly
        for size, n in [(3, 2), (1, 7), (2, 3), (4, 4)]:
            expected = len(
                set(itertools.combinations_with_replacement(range(size), n))
            )
            assert multiset_count(size, n) == expected
        assert multiset_count(3, 0) == 1

    def test_permutation_count(self):
        assert permutation_count(Multiset.from_elements("XYZ")) == 6
        assert permutation_count(Multiset.from_elements(["v", "^", "^"])) == 3
        assert permutation_count(Multiset.from_elements("A")) == 1
        assert permutation_count(Multiset({})) == 1

    def test_permutation_count_is_number_of_orderings(self):
        m = Multiset({"a": 2, "b": 1, "c": 3})
        orderings = set(itertools.permutations(m.elements(Alphabet(("a", "b", "c")))))
        assert permutation_count(m) == len(orderings)

    def test_rising_factorial(self):
        assert rising_factorial(mpq(1, 2), 3) == mpq(1, 2) * mpq(3, 2) * mpq(5, 2)
        assert rising_factorial(4, 0) == 1


class TestStepDistributions:
    def test_permutation_steps(self):
        m = Multiset.from_elements("AAB")
        assert permutation_step_dist(m, Multiset({})) == {
            "A": mpq(2, 3),
            "B": mpq(1, 3),
        }
        assert permutation_step_dist(m, Multiset({"A": 1})) == {
            "A": mpq(1, 2),
            "B": mpq(1, 2),
        }
        with pytest.raises(ValidationError):
            permutation_step_dist(m, m)

    def test_multiset_steps(self):
        d = SourceDistribution.uniform(AB)
        trials, theta = multiset_step_dist(d, AB, 0, 2, 0)
        assert (trials, theta) == (2, mpq(1, 2))
        # conditioning on the first symbol's count leaves a point mass
        trials, theta = multiset_step_dist(d, AB, 1, 1, mpq(1, 2))
        assert (trials, theta) == (1, mpq(1))

    def test_multiset_factorization_matches_enumeration(self):
        d = SourceDistribution.from_weights({"A": 1, "B": 2, "C": 3})
        n = 3
        for counts in itertools.product(range(n + 1), repeat=3):
            if sum(counts) != n:
                continue
            # oracle: sum the iid sequence probabilities of all orderings
            m = Multiset(dict(zip(ABC.symbols, counts)))
            expected = permutation_count(m) * (
                d("A") ** counts[0] * d("B") ** counts[1] * d("C") ** counts[2]
            )
            got = mpq(1)
            remaining, consumed = n, mpq(0)
            for pos, k in enumerate(counts):
                trials, theta = multiset_step_dist(d, ABC, pos, remaining, consumed)
                got *= binomial_pmf(k, trials, theta)
                remaining -= k
                consumed += d(ABC.symbols[pos])
            assert got == expected

    def test_combination_steps(self):
        dist = combination_step_dist(2, 3, 2)  # two of "A" in {A,A,B}, draw 2
        assert dist == {1: mpq(2, 3), 2: mpq(1, 3)}
        # oracle: enumerate the 3 unordered 2-subsets of {A1, A2, B}
        subsets = list(itertools.combinations(["A", "A", "B"], 2))
        for k, p in dist.items():
            assert p == mpq(sum(s.count("A") == k for s in subsets), len(subsets))
        assert combination_step_dist(1, 3, 0) == {0: mpq(1)}
        assert combination_step_dist(1, 3, 3) == {1: mpq(1)}
        with pytest.raises(ValidationError):
            combination_step_dist(1, 3, 4)

    def test_dirichlet_predictive(self):
        params = DirichletParams.uniform(AB)
        assert dirichlet_predictive(params, Multiset({})) == {
            "A": mpq(1, 2),
            "B": mpq(1, 2),
        }
        assert dirichlet_predictive(params, Multiset({"A": 2})) == {
            "A": mpq(3, 4),
            "B": mpq(1, 4),
        }

    def test_adaptive_multiset_steps(self):
        params = DirichletParams.uniform(AB)
        trials, a, b = adaptive_multiset_step_dist(params, AB, 0, 2, 0)
        assert (trials, a, b) == (2, mpq(1), mpq(1))
        # the resulting count distribution is uniform on {0, 1, 2}
        for k in range(3):
            assert beta_binomial_pmf(k, trials, a, b) == mpq(1, 3)

    def test_uniform_multiset_steps(self):
        assert uniform_multiset_step_dist(2, 3) == {k: mpq(1, 4) for k in range(4)}
        assert uniform_multiset_step_dist(1, 5) == {5: mpq(1)}
        assert uniform_multiset_step_dist(3, 2)[0] == mpq(1, 2)

    def test_uniform_multiset_factorization_is_uniform(self):
        # walking the per-symbol counts must give every multiset mass
        # 1 / multiset_count(K, N)
        symbols, n = 3, 4
        for counts in itertools.product(range(n + 1), repeat=symbols):
            if sum(counts) != n:
                continue
            p, remaining = mpq(1), n
            for pos, k in enumerate(counts):
                p *= uniform_multiset_step_dist(symbols - pos, remaining)[k]
                remaining -= k
            assert p == mpq(1, multiset_count(symbols, n))

    def test_truncated_perm_prob(self):
        m = Multiset.from_elements("AAB")
        assert truncated_perm_prob(m, ("A", "B")) == mpq(1, 3)
        assert truncated_perm_prob(m, ()) == 1
        assert truncated_perm_prob(Multiset.from_elements("XYZ"), "XYZ") == mpq(1, 6)
        with pytest.raises(ValidationError):
            truncated_perm_prob(m, ("B", "B"))

    def test_truncated_perm_matches_enumeration(self):
        m = Multiset.from_elements("AABC")
        pool = ["A", "A", "B", "C"]
        for k in range(5):
            seqs = list(itertools.permutations(pool, k))
            for prefix in set(seqs):
                expected = mpq(seqs.count(prefix), len(seqs))
                assert truncated_perm_prob(m, prefix) == expected


class TestContainers:
    def test_alphabet_rejects_duplicates(self):
        with pytest.raises(ValidationError):
            Alphabet(("A", "A"))

    def test_multiset_basics(self):
        m = Multiset.from_elements("ABBA")
        assert m.size == 4
        assert m.count("B") == 2
        assert m.count("Z") == 0
        assert m.elements(AB) == ["A", "A", "B", "B"]
        assert Multiset({"A": 1, "B": 0}) == Multiset({"A": 1})

    def test_source_distribution_must_normalize(self):
        with pytest.raises(ValidationError):
            SourceDistribution({"A": mpq(1, 2), "B": mpq(1, 3)})

    def test_source_distribution_from_weights(self):
        d = SourceDistribution.from_weights({"A": 3, "B": 1})
        assert d("A") == mpq(3, 4)

    def test_dirichlet_params_positive(self):
        with pytest.raises(ValidationError):
            DirichletParams({"A": mpq(0), "B": mpq(1)})
