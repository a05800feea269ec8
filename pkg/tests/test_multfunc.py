import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from multcoinc import characters
from multcoinc.errors import InvalidArgument
from multcoinc.multfunc import (
    BUILTIN_NAMES,
    character,
    check_unit_bounded,
    conjugate,
    divisor,
    euler_phi,
    hecke_delta,
    identity,
    liouville,
    mf_archimedean,
    mf_builtin,
    mf_combine,
    mf_eval,
    mf_values,
    moebius,
    nit,
    one,
    parse_function,
    power,
    product,
    sample_value_class,
    sigma,
    sign_flip,
    squarefree_twist,
    support_indicator,
)
from oracles import (
    naive_divisors,
    naive_liouville,
    naive_moebius,
    naive_phi,
    naive_tau,
    prime_modulus_character,
    primitive_count,
    trial_factor,
)

N = 10**5


def catalogue():
    return [
        one(),
        moebius(),
        liouville(),
        divisor(),
        euler_phi(),
        sigma(),
        identity(),
        nit(0.7),
        character(7, 3),
        character(12, 5),
        squarefree_twist(character(5, 2)),
        sign_flip(3, 7),
        hecke_delta(N),
        mf_archimedean(sigma(), 0.5),
        product(moebius(), nit(-1.3)),
        conjugate(character(9, 2)),
        power(character(11, 2), 3),
    ]


@pytest.fixture(scope="module")
def value_arrays(table_small):
    return {f.name: mf_values(f, N, table_small) for f in catalogue()}


def test_naive_agreement(table_small):
    for n in range(1, 400):
        assert mf_eval(moebius(), n, table_small) == naive_moebius(n)
        assert mf_eval(liouville(), n, table_small) == naive_liouville(n)
        assert mf_eval(divisor(), n, table_small) == len(naive_divisors(n))
        assert mf_eval(sigma(), n, table_small) == sum(naive_divisors(n))
        assert mf_eval(euler_phi(), n, table_small) == naive_phi(n)
        assert mf_eval(identity(), n, table_small) == n
        assert mf_eval(sign_flip(3), n, table_small) == (-1) ** sum(e for p, e in trial_factor(n) if p == 3)


def test_hecke_delta_matches_tau(table_small):
    taus = naive_tau(30, depth=30)
    for n in range(1, 31):
        assert mf_eval(hecke_delta(N), n, table_small) == pytest.approx(taus[n - 1] / n**5.5, rel=1e-12)


def test_values_array_matches_pointwise(table_small, value_arrays):
    rng = np.random.default_rng(1)
    for f in catalogue():
        vals = value_arrays[f.name]
        for n in rng.integers(1, N + 1, size=200):
            assert vals[n] == pytest.approx(mf_eval(f, int(n), table_small), rel=1e-12, abs=1e-15)


def test_multiplicativity(value_arrays):
    # 10^4 random coprime pairs per function
    rng = np.random.default_rng(2)
    m = rng.integers(1, 400, size=40000)
    n = rng.integers(1, 250, size=40000)
    ok = (np.gcd(m, n) == 1) & (m * n <= N)
    m, n = m[ok][:10**4], n[ok][:10**4]
    assert m.size == 10**4
    for name, v in value_arrays.items():
        lhs, rhs = v[m * n], v[m] * v[n]
        assert np.all(np.abs(lhs - rhs) <= 1e-9 * (1 + np.abs(rhs))), name


def test_completely_multiplicative_flags(value_arrays):
    rng = np.random.default_rng(3)
    m = rng.integers(1, 300, size=2000)
    n = rng.integers(1, 300, size=2000)
    for f in catalogue():
        if f.completely_multiplicative:
            v = value_arrays[f.name]
            assert np.allclose(v[m * n], v[m] * v[n], rtol=1e-9, atol=1e-12), f.name


@given(st.integers(1, N), st.floats(-20, 20, allow_nan=False))
def test_projection_identity(table_small, n, t):
    for f in (moebius(), sigma(), squarefree_twist(character(5, 2)), hecke_delta(N)):
        a = mf_eval(mf_archimedean(f, t), n, table_small)
        b = mf_eval(mf_archimedean(f, -t), n, table_small)
        if mf_eval(f, n, table_small) != 0:
            assert abs(a * b - 1) < 1e-9
        else:
            assert a * b == 0


def test_support_indicator(table_small):
    s = support_indicator(moebius())
    for n in range(1, 200):
        assert mf_eval(s, n, table_small) == abs(naive_moebius(n))


@pytest.mark.parametrize("q", range(2, 31))
def test_character_orthogonality(q):
    for a in characters.character_indices(q):
        vals = characters.character_table(q, a)
        principal = a % q == 1
        total = vals.sum()
        if principal:
            assert total == pytest.approx(sum(math.gcd(n, q) == 1 for n in range(q)))
        else:
            assert abs(total) < 1e-9


@pytest.mark.parametrize("q", [3, 5, 7, 11, 13])
def test_characters_match_discrete_logs(q):
    for a in range(1, q):
        vals = characters.character_table(q, a)
        for n in range(q):
            assert abs(vals[n] - prime_modulus_character(q, a, n)) < 1e-12


def test_primitive_count():
    got = characters.primitive_characters(30)
    for q in range(1, 31):
        assert sum(1 for c in got if c[0] == q) == primitive_count(q)


@given(st.integers(2, 60), st.data())
def test_characters_vanish_on_shared_factors(q, data):
    a = data.draw(st.sampled_from(characters.character_indices(q)))
    f = character(q, a)
    ps = np.array([2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59])
    vals = f.at_primes(ps)
    assert np.all((vals == 0) == (q % ps == 0))


def test_parse_function():
    f = parse_function("proj(t=0.5,inner=sigma)")
    assert f.at_primes(np.array([5]))[0] == pytest.approx(np.exp(0.5j * math.log(6)))
    g = parse_function("product(moebius, power(m=2, inner=character(q=5, index=2)))")
    assert g.at_primes(np.array([2]))[0] == pytest.approx(1.0)
    assert parse_function("nit(1e-1)").name == nit(0.1).name


@pytest.mark.parametrize("bad", ["", "nosuch", "sigma(", "proj(t=1)", "moebius)", "character(q=4,index=2)"])
def test_parse_function_rejects(bad):
    with pytest.raises(InvalidArgument):
        parse_function(bad)


def test_builtin_registry():
    for name in ("moebius", "liouville", "divisor", "euler_phi", "sigma", "identity", "hecke_delta"):
        assert name in BUILTIN_NAMES
        mf_builtin(name)
    with pytest.raises(InvalidArgument):
        mf_builtin("nope")
    with pytest.raises(InvalidArgument):
        mf_combine(moebius(), None, "product")
    with pytest.raises(InvalidArgument):
        power(moebius(), 0)


def test_unit_bounded_and_value_class(table_small):
    ps = table_small.primes_upto(100)
    check_unit_bounded(moebius(), ps)
    with pytest.raises(InvalidArgument):
        check_unit_bounded(sigma(), ps)
    for f in (moebius(), nit(2.0), character(8, 3), sign_flip(2), mf_archimedean(sigma(), 1.0)):
        assert sample_value_class(f, table_small, samples=200)
