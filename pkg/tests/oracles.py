"""Independent oracles: trial division, explicit expansion, brute-force enumeration.

Nothing here imports the library.
"""

import math

import numpy as np


def trial_division_is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def trial_division_pi(x: int) -> int:
    return sum(1 for n in range(2, x + 1) if trial_division_is_prime(n))


def trial_factor(n: int) -> list[tuple[int, int]]:
    out, d = [], 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            n //= d
            e += 1
        if e:
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


def naive_moebius(n: int) -> int:
    fac = trial_factor(n)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def naive_primes(x: int) -> list[int]:
    return [n for n in range(2, x + 1) if trial_division_is_prime(n)]


def naive_tau(count: int, depth: int = 20) -> list[int]:
    """tau(1..count) from q * prod_{n <= depth} (1 - q^n)^24, multiplied out term by term."""
    deg = count  # need coefficients of q^0 .. q^(count-1) of the product
    poly = [1] + [0] * (deg - 1)
    for n in range(1, depth + 1):
        for _ in range(24):
            nxt = poly[:]
            for i in range(n, deg):
                nxt[i] -= poly[i - n]
            poly = nxt
    return poly[:count]


def euler_product(primes, factor) -> float:
    out = 1.0
    for p in primes:
        out *= factor(p)
    return out


def squarefree_pair_product(cutoff: int, skip_two: bool) -> float:
    """prod (1 - 2/p^2) over p <= cutoff, via a plain sieve."""
    sieve = bytearray([1]) * (cutoff + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(cutoff) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, cutoff + 1, i)))
    ps = np.flatnonzero(np.frombuffer(bytes(sieve), dtype=np.uint8)).astype(np.float64)
    if skip_two:
        ps = ps[ps > 2]
    return float(np.prod(1.0 - 2.0 / ps**2))


def naive_divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def naive_liouville(n: int) -> int:
    return (-1) ** sum(e for _, e in trial_factor(n))


def naive_phi(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


def smallest_primitive_root(p: int) -> int:
    for g in range(2, p):
        if len({pow(g, k, p) for k in range(1, p)}) == p - 1:
            return g
    return 1


def prime_modulus_character(q: int, a: int, n: int) -> complex:
    """Conrey character chi_q(a, n) for an odd prime q, via discrete logs by enumeration."""
    if n % q == 0:
        return 0j
    g = smallest_primitive_root(q)
    ind = {pow(g, k, q): k for k in range(q - 1)}
    return complex(np.exp(2j * math.pi * ind[a % q] * ind[n % q] / (q - 1)))


def primitive_count(q: int) -> int:
    """Number of primitive characters mod q: sum_{d | q} mu(q/d) phi(d)."""
    return sum(naive_moebius(q // d) * naive_phi(d) for d in naive_divisors(q))


def naive_restricted_pair_count(x: int, bad: set[int]) -> int:
    """Odd n <= x with n, n + 2 squarefree and no prime of ``bad`` dividing n(n + 2)."""
    count = 0
    for n in range(1, x + 1, 2):
        fac = trial_factor(n) + trial_factor(n + 2)
        if all(e == 1 for _, e in fac) and not any(p in bad for p, _ in fac):
            count += 1
    return count
