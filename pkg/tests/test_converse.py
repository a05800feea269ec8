import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from multcoinc.converse import (
    SieveConfig,
    c_f_prime,
    converse_report,
    correction_factor,
    inclusion_exclusion_count,
    odd_pair_density,
    pair_squarefree_constant,
    progression_pair_count,
    restricted_pair_count,
    sign_split_density,
)
from multcoinc.errors import InvalidArgument
from multcoinc.multfunc import character, liouville, moebius, nit, one, sign_flip
from oracles import naive_restricted_pair_count, squarefree_pair_product

# brute force over n <= 3000 with trial division
PAIRS_3000 = {(): 964, (3,): 414, (3, 5, 7): 202}


def test_tiny_count(table_small):
    # n = 1, 3, 5 (7 fails: 9 is not squarefree)
    assert restricted_pair_count(one(), 10, table_small) == 3


@pytest.mark.parametrize("bad", list(PAIRS_3000))
def test_counts_match_brute_force(table_small, bad):
    f = sign_flip(*bad) if bad else one()
    assert restricted_pair_count(f, 3000, table_small) == PAIRS_3000[bad]


@given(st.integers(1, 400), st.sets(st.sampled_from([3, 5, 7, 11, 13, 17]), max_size=3))
@settings(max_examples=40)
def test_counts_match_brute_force_random(table_small, x, bad):
    f = sign_flip(*bad) if bad else one()
    assert restricted_pair_count(f, x, table_small) == naive_restricted_pair_count(x, bad)


def test_constants(table_mid):
    assert pair_squarefree_constant(10**6, table_mid) == pytest.approx(
        0.5 * squarefree_pair_product(10**6, skip_two=False), rel=1e-12
    )
    assert odd_pair_density(10**6, table_mid) == pytest.approx(
        0.5 * squarefree_pair_product(10**6, skip_two=True), rel=1e-12
    )


@pytest.mark.parametrize("p", [3, 5, 7, 11, 101])
def test_correction_factor(p):
    ratio = (1 - Fraction(2, p)) / (1 - Fraction(2, p * p))
    assert correction_factor(p) == pytest.approx(float(ratio), rel=1e-14)
    assert float(1 - Fraction(2 * (p - 1), p * p - 2)) == pytest.approx(float(ratio), rel=1e-14)


def test_c_f_prime_exact(table_small):
    assert c_f_prime(sign_flip(3), 10**5, table_small) == pytest.approx(3 / 7, rel=1e-14)
    assert c_f_prime(sign_flip(3, 5), 10**5, table_small) == pytest.approx(45 / 161, rel=1e-14)
    # p = 2 is excluded from the product
    assert c_f_prime(sign_flip(2), 10**5, table_small) == 1.0
    with pytest.warns(UserWarning):
        c_f_prime(liouville(), 10**5, table_small)


def test_trivial_density(table_mid):
    d = restricted_pair_count(one(), 10**6, table_mid) / 10**6
    assert abs(d - 0.5 * squarefree_pair_product(10**6, skip_two=True)) <= 0.01


def test_sign_flip_density_and_report(table_mid):
    rep = converse_report(sign_flip(3), 10**6, table_mid)
    full = 0.5 * squarefree_pair_product(10**6, skip_two=True) * 3 / 7
    assert rep.full_prediction == pytest.approx(full, rel=1e-12)
    assert abs(rep.density - full) <= 0.005
    assert rep.matched == "full_prediction"
    assert rep.stated == pytest.approx(3 / 7)
    d = rep.to_dict()
    assert {"count", "density", "c_f_prime", "full_prediction", "plus", "minus"} <= set(d)


def test_progression_counts(table_mid):
    ds = [d for d in range(1, 101, 2) if all(d % (p * p) for p in (3, 5, 7))]
    for d1 in ds:
        for d2 in ds:
            if d1 * d2 <= 100 and math.gcd(d1, d2) == 1:
                count, main = progression_pair_count(d1, d2, 10**6, table_mid)
                assert 0.97 <= count / main <= 1.03, (d1, d2)


def test_progression_rejects(table_small):
    for d1, d2 in ((2, 1), (9, 1), (3, 3)):
        with pytest.raises(InvalidArgument):
            progression_pair_count(d1, d2, 1000, table_small)


@pytest.mark.parametrize("bad", [(3,), (3, 5), (3, 7, 11), (5, 13, 101, 1009)])
def test_inclusion_exclusion(table_small, bad):
    check = inclusion_exclusion_count(sign_flip(*bad), 10**5, table_small)
    assert check.consistent
    assert check.sieved - check.tail == check.direct


def test_sieve_with_every_prime_bad(table_small):
    # every odd prime is bad, so nothing survives (n = 1 has n + 2 = 3)
    check = inclusion_exclusion_count(liouville(), 10**5, table_small, SieveConfig(z_exponent=0.99))
    assert check.sieve_primes == (3, 5, 7, 11)
    assert check.consistent and check.direct == 0


def test_sieve_config():
    for z in (0.0, 1.0):
        with pytest.raises(InvalidArgument):
            SieveConfig(z_exponent=z)
    assert SieveConfig().z(10**5) == pytest.approx(math.log(10**5) ** 0.99)


def test_sign_split(table_small):
    plus, minus = sign_split_density(liouville(), 10**5, table_small)
    assert plus + minus == pytest.approx(1.0, abs=1e-12)
    plus, minus = sign_split_density(moebius(), 10**5, table_small)
    assert 0 <= plus <= 1 and 0 <= minus <= 1


def test_preconditions(table_small):
    with pytest.raises(InvalidArgument):
        restricted_pair_count(nit(1.0), 100, table_small)
    # mu(p) = -1 != 0: allowed, and every odd prime is bad
    assert restricted_pair_count(moebius(), 100, table_small) == 0
    with pytest.raises(InvalidArgument):
        restricted_pair_count(character(3, 2), 100, table_small)
    with pytest.raises(InvalidArgument):
        restricted_pair_count(one(), 10**5 + 9, table_small)
