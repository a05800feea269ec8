"""Squarefree-pair counts behind the converse for real-valued ``f``.

Everything here concerns odd ``n`` with ``n`` and ``n + 2`` squarefree; on
such ``n`` the two values are coprime and ``f(n) = f(n + 2) = 1`` as soon as
``f(p) = 1`` at every prime dividing ``n(n + 2)``. Counting is direct over
``n <= x``; Mobius inversion over ``P(z)`` is kept as a cross-check.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from multcoinc.correlate import AffinePair, log_density_equal
from multcoinc.errors import BudgetExceeded, InvalidArgument
from multcoinc.multfunc import MultiplicativeFunction
from multcoinc.primes import PrimeTable

# warn above this reciprocal sum of primes with f(p) != 1
SPARSE_WARN = 1.0
MAX_SIEVE_PRIMES = 12


@dataclass(frozen=True)
class SieveConfig:
    z_exponent: float = 0.99
    prime_cutoff: int = 10**6

    def __post_init__(self):
        if not (0 < self.z_exponent < 1):
            raise InvalidArgument("z_exponent must lie in (0, 1)")
        if self.prime_cutoff < 2:
            raise InvalidArgument("prime_cutoff must be >= 2")

    def z(self, x: int) -> float:
        return math.log(x) ** self.z_exponent


def _check_range(x: int, table: PrimeTable) -> None:
    if x < 1:
        raise InvalidArgument("x must be positive")
    if x + 2 > min(table.limit, table.factor_limit):
        raise InvalidArgument(f"x + 2 = {x + 2} exceeds the table limit {table.limit}")


def bad_primes(f: MultiplicativeFunction, upto: int, table: PrimeTable) -> np.ndarray:
    """Primes ``p <= upto`` with ``f(p) != 1``: exact for integer-valued ``f``, else ``|f(p) - 1| > 1e-12``."""
    ps = table.primes_upto(upto)
    v = f.at_primes(ps)
    off = v != 1 if f.integer_valued else np.abs(v - 1) > 1e-12
    return ps[off]


def squarefree_mask(N: int, table: PrimeTable) -> np.ndarray:
    """``mask[n]`` is true iff ``n`` is squarefree, ``0 <= n <= N`` (``mask[0]`` false)."""
    mask = np.ones(N + 1, dtype=bool)
    mask[0] = False
    for p in table.primes_upto(math.isqrt(N)):
        mask[p * p :: p * p] = False
    return mask


def _avoid_mask(N: int, primes: np.ndarray) -> np.ndarray:
    """``n <= N`` divisible by none of ``primes``."""
    good = np.ones(N + 1, dtype=bool)
    for p in primes:
        good[:: int(p)] = False
    return good


def _pair_mask(x: int, table: PrimeTable) -> np.ndarray:
    """Indexed by ``n = 0..x``: ``n`` odd, ``n`` and ``n + 2`` squarefree."""
    sf = squarefree_mask(x + 2, table)
    ok = sf[: x + 1] & sf[2 : x + 3]
    ok[0::2] = False
    return ok


def restricted_pair_count(f: MultiplicativeFunction, x: int, table: PrimeTable) -> int:
    """Odd ``n <= x`` with ``n, n + 2`` squarefree and ``f(p) = 1`` for every ``p | n(n + 2)``."""
    _check_range(x, table)
    ps = table.primes_upto(x + 2)
    if not f.is_real:
        raise InvalidArgument("f must be real-valued")
    if np.any(f.at_primes(ps) == 0):
        raise InvalidArgument("f vanishes at some prime <= x + 2")
    good = _avoid_mask(x + 2, bad_primes(f, x + 2, table))
    ok = _pair_mask(x, table) & good[: x + 1] & good[2 : x + 3]
    return int(ok.sum())


def correction_factor(p: int) -> float:
    """``1 - 2(p - 1)/(p^2 - 2)``, equal to ``(1 - 2/p) / (1 - 2/p^2)``."""
    return 1.0 - 2.0 * (p - 1) / (p * p - 2)


def c_f_prime(f: MultiplicativeFunction, cutoff: int, table: PrimeTable) -> float:
    """``prod_{3 <= p <= cutoff, f(p) != 1} (1 - 2(p - 1)/(p^2 - 2))``."""
    if cutoff > table.limit:
        raise InvalidArgument(f"cutoff={cutoff} exceeds the table limit {table.limit}")
    bad = bad_primes(f, cutoff, table)
    bad = bad[bad >= 3]
    recip = float(np.sum(1.0 / bad))
    if recip > SPARSE_WARN:
        warnings.warn(f"primes with f(p) != 1 have reciprocal sum {recip:.3f} up to {cutoff}", stacklevel=2)
    b = bad.astype(np.float64)
    return float(np.prod(1.0 - 2.0 * (b - 1) / (b * b - 2)))


def pair_squarefree_constant(cutoff: int, table: PrimeTable) -> float:
    """``(1/2) prod_{p <= cutoff} (1 - 2/p^2)``."""
    if cutoff > table.limit:
        raise InvalidArgument(f"cutoff={cutoff} exceeds the table limit {table.limit}")
    p = table.primes_upto(cutoff).astype(np.float64)
    return 0.5 * float(np.prod(1.0 - 2.0 / (p * p)))


def odd_pair_density(cutoff: int, table: PrimeTable) -> float:
    """``(1/2) prod_{3 <= p <= cutoff} (1 - 2/p^2)``: density of odd ``n`` with ``n, n + 2`` squarefree."""
    return 2.0 * pair_squarefree_constant(cutoff, table)


def _squarefree_odd(d: int) -> bool:
    if d < 1 or d % 2 == 0:
        return False
    k = 3
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 2
    return True


def progression_pair_count(
    d1: int, d2: int, x: int, table: PrimeTable, cutoff: int = 10**6
) -> tuple[int, float]:
    """Count odd ``n <= x`` with ``d1 | n``, ``d2 | n + 2``, both squarefree; with its main term.

    Main term ``x phi(d1) phi(d2) / (2 (d1 d2)^2) prod_{3 <= p <= cutoff, p not | d1 d2} (1 - 2/p^2)``.
    The prime 2 is left out of the product because oddness of ``n`` already
    accounts for it through the factor ``1/2``.
    """
    _check_range(x, table)
    if not (_squarefree_odd(d1) and _squarefree_odd(d2)):
        raise InvalidArgument("d1 and d2 must be odd and squarefree")
    if math.gcd(d1, d2) != 1:
        raise InvalidArgument("d1 and d2 must be coprime")
    ok = _pair_mask(x, table)
    n = np.flatnonzero(ok)
    count = int(np.count_nonzero((n % d1 == 0) & ((n + 2) % d2 == 0)))
    cutoff = min(cutoff, table.limit)
    p = table.primes_upto(cutoff)
    p = p[(p >= 3) & ((d1 * d2) % p != 0)].astype(np.float64)
    phi = 1.0
    for d in (d1, d2):
        for q in {int(q) for q in table.primes_upto(d) if d % q == 0}:
            phi *= q - 1
    main = x * phi / (2.0 * (d1 * d2) ** 2) * float(np.prod(1.0 - 2.0 / (p * p)))
    return count, main


@dataclass(frozen=True)
class SieveCrossCheck:
    z: float
    sieve_primes: tuple[int, ...]
    sieved: int
    tail: int
    direct: int

    @property
    def consistent(self) -> bool:
        return self.sieved - self.tail == self.direct


def inclusion_exclusion_count(
    f: MultiplicativeFunction, x: int, table: PrimeTable, config: SieveConfig = SieveConfig()
) -> SieveCrossCheck:
    """Mobius inversion over coprime ``d1, d2 | P(z)`` against the direct count.

    ``sieved`` counts the ``n`` clean at bad primes ``<= z``; ``tail`` is the
    exact number of those still hit by a bad prime ``> z``.
    """
    _check_range(x, table)
    z = config.z(x)
    bad = bad_primes(f, x + 2, table)
    bad = bad[bad >= 3]
    small = [int(p) for p in bad[bad <= z]]
    if len(small) > MAX_SIEVE_PRIMES:
        raise BudgetExceeded(f"{len(small)} sieve primes exceed the budget {MAX_SIEVE_PRIMES}")
    ok = _pair_mask(x, table)
    n = np.flatnonzero(ok)
    sieved = 0
    # each bad prime divides n, divides n + 2, or neither
    for assign in itertools.product((0, 1, 2), repeat=len(small)):
        d1 = math.prod(p for p, a in zip(small, assign) if a == 1)
        d2 = math.prod(p for p, a in zip(small, assign) if a == 2)
        sign = (-1) ** sum(a != 0 for a in assign)
        sieved += sign * int(np.count_nonzero((n % d1 == 0) & ((n + 2) % d2 == 0)))
    clean_small = _avoid_mask(x + 2, np.array(small, dtype=np.int64))
    clean_all = _avoid_mask(x + 2, bad)
    base = ok & clean_small[: x + 1] & clean_small[2 : x + 3]
    full = base & clean_all[: x + 1] & clean_all[2 : x + 3]
    tail = int(base.sum() - full.sum())
    return SieveCrossCheck(z, tuple(small), sieved, tail, restricted_pair_count(f, x, table))


def sign_split_density(f: MultiplicativeFunction, x: int, table: PrimeTable) -> tuple[float, float]:
    """Logarithmic densities of ``f(n) = f(n + 2)`` and ``f(n) = -f(n + 2)``, both non-zero."""
    if not f.is_real:
        raise InvalidArgument("f must be real-valued")
    _check_range(x, table)
    pair = AffinePair.shift(2)
    plus = log_density_equal(f, f, pair, 1, x, table).normalized
    minus = log_density_equal(f, f, pair, -1, x, table).normalized
    return plus, minus


@dataclass(frozen=True)
class ConverseReport:
    count: int
    density: float
    c_f_prime: float
    stated: float
    sieve_constant: float
    full_prediction: float
    matched: str
    plus: float
    minus: float

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "density": self.density,
            "c_f_prime": self.c_f_prime,
            "candidates": {
                "stated": self.stated,
                "sieve_constant": self.sieve_constant,
                "full_prediction": self.full_prediction,
            },
            "full_prediction": self.full_prediction,
            "matched": self.matched,
            "plus": self.plus,
            "minus": self.minus,
        }


def converse_report(
    f: MultiplicativeFunction, x: int, table: PrimeTable, config: SieveConfig = SieveConfig()
) -> ConverseReport:
    """Direct count against three candidate constants, naming the closest.

    ``stated`` is ``c_f'`` alone, ``sieve_constant`` is ``(1/2) prod_p (1 - 2/p^2) * c_f'``
    and ``full_prediction`` is ``(1/2) prod_{p >= 3} (1 - 2/p^2) * c_f'``.
    """
    count = restricted_pair_count(f, x, table)
    density = count / x
    cutoff = min(config.prime_cutoff, table.limit)
    cf = c_f_prime(f, cutoff, table)
    C = pair_squarefree_constant(cutoff, table)
    cands = {"stated": cf, "sieve_constant": C * cf, "full_prediction": 2 * C * cf}
    matched = min(cands, key=lambda k: abs(cands[k] - density))
    plus, minus = sign_split_density(f, x, table)
    return ConverseReport(
        count, density, cf, cands["stated"], cands["sieve_constant"], cands["full_prediction"], matched, plus, minus
    )
