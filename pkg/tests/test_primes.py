import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from multcoinc.errors import InvalidArgument
from multcoinc.primes import build_prime_table, factorize, restricted_prime_sum
from oracles import naive_primes, trial_division_is_prime, trial_division_pi, trial_factor

# sum of 1/p over p <= 10^4, from naive_primes
RECIP_1E4 = 2.4830599472335644
# same sum restricted to p = 1 mod 4
RECIP_1MOD4_1E4 = 0.8246944425308347


def test_tiny_table():
    t = build_prime_table(10)
    assert t.primes.tolist() == [2, 3, 5, 7]
    assert t.pi(10) == 4 and t.pi(1) == 0


def test_pi_million(table_mid):
    # independent bytearray sieve gives 78498
    assert table_mid.pi(10**6) == 78498


def test_pi_matches_trial_division_everywhere_below_1e4(table_small):
    pis = np.cumsum([trial_division_is_prime(n) for n in range(10**4 + 1)])
    got = np.searchsorted(table_small.primes, np.arange(10**4 + 1), side="right")
    assert np.array_equal(pis, got)
    assert table_small.pi(10**4) == trial_division_pi(10**4)


def test_primes_match_naive(table_small):
    assert table_small.primes_upto(5000).tolist() == naive_primes(5000)


def test_segmented_beyond_factor_limit():
    t = build_prime_table(200_000, factor_limit=1000)
    assert t.pi(200_000) == trial_division_pi(200_000)
    assert t.is_prime(199_999) == trial_division_is_prime(199_999)
    assert factorize(199_998, t) == trial_factor(199_998)


def test_factorize_known(table_small):
    assert factorize(1, table_small) == []
    assert factorize(9699690, build_prime_table(10**7)) == [(p, 1) for p in (2, 3, 5, 7, 11, 13, 17, 19)]
    assert factorize(2**16, table_small) == [(2, 16)]


@pytest.mark.parametrize("n", [0, -3, 10**5 + 11])
def test_factorize_rejects_out_of_range(n, table_small):
    with pytest.raises(InvalidArgument):
        factorize(n, table_small)


def test_bad_limit():
    with pytest.raises(InvalidArgument):
        build_prime_table(1)


@given(st.integers(1, 10**5))
def test_factorization_invariants(table_small, n):
    fac = factorize(n, table_small)
    assert math.prod(p**e for p, e in fac) == n
    assert all(e >= 1 for _, e in fac)
    assert fac == trial_factor(n)


@given(st.integers(2, 10**5))
def test_spf_is_smallest_prime_factor(table_small, n):
    p = int(table_small.spf[n])
    assert n % p == 0 and trial_division_is_prime(p)
    assert all(n % q for q in range(2, min(p, 400)))


def test_reciprocal_sum_frozen(table_small):
    assert restricted_prime_sum(table_small, 10**4) == pytest.approx(RECIP_1E4, abs=1e-12)
    got = restricted_prime_sum(table_small, 10**4, lambda p: p % 4 == 1, compensated=True)
    assert got == pytest.approx(RECIP_1MOD4_1E4, abs=1e-12)


@pytest.mark.parametrize("x", [10**4, 10**5, 10**6, 10**7])
def test_mertens(table_big, x):
    s = restricted_prime_sum(table_big, x)
    assert abs(s - (math.log(math.log(x)) + 0.26149)) <= 0.05


@given(st.integers(2, 10**5), st.integers(2, 10**5), st.integers(2, 12))
def test_prime_sum_monotone_and_additive(table_small, x, y, q):
    lo, hi = sorted((x, y))
    assert restricted_prime_sum(table_small, lo) <= restricted_prime_sum(table_small, hi)
    both = restricted_prime_sum(table_small, hi, compensated=True)
    a = restricted_prime_sum(table_small, hi, lambda p: p % q == 1, compensated=True)
    b = restricted_prime_sum(table_small, hi, lambda p: p % q != 1, compensated=True)
    assert a + b == pytest.approx(both, abs=1e-12)


def test_prime_sum_beyond_table(table_small):
    with pytest.raises(InvalidArgument):
        restricted_prime_sum(table_small, 10**6)
