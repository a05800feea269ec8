"""Prime tables, smallest-prime-factor sieves and restricted prime sums.

Everything downstream (distances, densities, sieves) iterates either over the
primes up to some ``x`` or over all ``n <= x`` factored through the
smallest-prime-factor array, so both live on one immutable :class:`PrimeTable`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from multcoinc.errors import InvalidArgument

MAX_LIMIT = 2**40
DEFAULT_FACTOR_LIMIT = 10**8
SEGMENT_SIZE = 1 << 18


@dataclass(frozen=True)
class Decomposition:
    """Vectorised factor structure of every ``n <= factor_limit``.

    For ``n >= 2`` with ``p = spf[n]``: ``head[n] = p**exp[n]`` is the exact
    power of ``p`` dividing ``n`` and ``rest[n] = n // head[n]``.
    ``levels[j]`` lists (sorted) the ``n`` with exactly ``j + 2`` distinct
    prime factors; ``prime_powers`` lists the ``n`` with one.
    """

    head: np.ndarray
    exp: np.ndarray
    rest: np.ndarray
    prime_powers: np.ndarray
    levels: tuple[np.ndarray, ...]


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """Primes up to ``limit`` and the smallest-prime-factor map up to ``factor_limit``."""

    limit: int
    primes: np.ndarray
    spf: np.ndarray
    factor_limit: int

    def __repr__(self) -> str:
        return f"PrimeTable(limit={self.limit}, primes={self.primes.size}, factor_limit={self.factor_limit})"

    def pi(self, x: int) -> int:
        """Number of primes ``<= x``."""
        return int(np.searchsorted(self.primes, x, side="right"))

    def primes_upto(self, x: int) -> np.ndarray:
        return self.primes[: self.pi(x)]

    def is_prime(self, n: int) -> bool:
        if n < 2 or n > self.limit:
            return False
        if n <= self.factor_limit:
            return int(self.spf[n]) == n
        i = np.searchsorted(self.primes, n)
        return i < self.primes.size and int(self.primes[i]) == n

    @cached_property
    def decomposition(self) -> Decomposition:
        return _decompose(self.spf)


def _spf_sieve(n: int) -> np.ndarray:
    dtype = np.int32 if n < 2**31 else np.int64
    spf = np.zeros(n + 1, dtype=dtype)
    for p in range(2, math.isqrt(n) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    unset = np.flatnonzero(spf == 0)
    spf[unset] = unset.astype(dtype)
    spf[0] = 0
    spf[1] = 0
    return spf


def _segmented_primes(lo: int, hi: int, base: np.ndarray, segment: int = SEGMENT_SIZE) -> np.ndarray:
    """Primes in ``(lo, hi]`` by a segmented sieve; ``base`` must contain all primes <= sqrt(hi)."""
    out = []
    start = lo + 1
    while start <= hi:
        stop = min(start + segment, hi + 1)
        mark = np.ones(stop - start, dtype=bool)
        for p in base:
            p = int(p)
            if p * p >= stop:
                break
            first = max(p * p, -(-start // p) * p)
            mark[first - start :: p] = False
        found = np.flatnonzero(mark).astype(np.int64) + start
        out.append(found[found >= 2])
        start = stop
    return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


def build_prime_table(limit: int, factor_limit: int = DEFAULT_FACTOR_LIMIT) -> PrimeTable:
    """Sieve primes up to ``limit``; the spf array covers ``min(limit, factor_limit)``.

    Above ``factor_limit`` primes come from a segmented sieve so memory stays
    bounded by the segment size plus the output.
    """
    if not isinstance(limit, (int, np.integer)) or limit < 2:
        raise InvalidArgument(f"limit must be an integer >= 2, got {limit!r}")
    if limit > MAX_LIMIT:
        raise InvalidArgument(f"limit {limit} exceeds the supported maximum 2**40")
    limit = int(limit)
    flim = max(2, min(limit, int(factor_limit)))
    spf = _spf_sieve(flim)
    small = np.flatnonzero(spf[2:] == np.arange(2, flim + 1)).astype(np.int64) + 2
    if limit > flim:
        root = math.isqrt(limit)
        base = small if root <= flim else np.concatenate([small, _segmented_primes(flim, root, small)])
        primes = np.concatenate([small, _segmented_primes(flim, limit, base)])
    else:
        primes = small
    primes.setflags(write=False)
    spf.setflags(write=False)
    return PrimeTable(limit=limit, primes=primes, spf=spf, factor_limit=flim)


def _decompose(spf: np.ndarray) -> Decomposition:
    n_max = spf.size - 1
    idx = np.arange(n_max + 1, dtype=spf.dtype)
    p = spf.copy()
    p[:2] = 1
    head = p.copy()
    exp = np.zeros(n_max + 1, dtype=np.int8)
    exp[2:] = 1
    rest = idx // p
    active = np.arange(2, n_max + 1)
    active = active[(rest[active] > 1) & (spf[rest[active]] == p[active])]
    while active.size:
        pa = p[active]
        head[active] *= pa
        exp[active] += 1
        rest[active] //= pa
        r = rest[active]
        active = active[(r > 1) & (spf[r] == pa)]
    omega = np.zeros(n_max + 1, dtype=np.int8)
    while True:
        nxt = omega[rest] + 1
        nxt[:2] = 0
        if np.array_equal(nxt, omega):
            break
        omega = nxt
    prime_powers = np.flatnonzero(omega == 1)
    levels = tuple(np.flatnonzero(omega == j) for j in range(2, int(omega.max(initial=0)) + 1))
    for arr in (head, exp, rest, prime_powers, *levels):
        arr.setflags(write=False)
    return Decomposition(head=head, exp=exp, rest=rest, prime_powers=prime_powers, levels=levels)


def factorize(n: int, table: PrimeTable) -> list[tuple[int, int]]:
    """Factor ``1 <= n <= table.limit`` into ``[(p, e), ...]`` with increasing ``p``."""
    n = int(n)
    if n < 1 or n > table.limit:
        raise InvalidArgument(f"n={n} outside [1, {table.limit}]")
    out: list[tuple[int, int]] = []
    if n > table.factor_limit:
        # trial division by table primes; sqrt(n) <= sqrt(limit) is always covered
        for p in table.primes:
            p = int(p)
            if p * p > n:
                break
            if n % p == 0:
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                out.append((p, e))
                if n <= table.factor_limit:
                    break
        if n > table.factor_limit:
            out.append((n, 1))
            return out
    spf = table.spf
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append((p, e))
    return out


def restricted_prime_sum(
    table: PrimeTable,
    x: int,
    member: Callable[[np.ndarray], np.ndarray] | None = None,
    compensated: bool = False,
) -> float:
    """Sum of ``1/p`` over primes ``p <= x`` accepted by ``member``.

    ``member`` receives the array of primes and returns a boolean mask (a
    plain ``lambda p: p % 4 == 1`` works); ``None`` accepts every prime.
    Terms are accumulated sequentially in increasing ``p``; ``compensated``
    switches to ``math.fsum``.
    """
    if x > table.limit:
        raise InvalidArgument(f"x={x} exceeds table limit {table.limit}")
    ps = table.primes_upto(x)
    if member is not None:
        mask = np.broadcast_to(np.asarray(member(ps), dtype=bool), ps.shape)
        ps = ps[mask]
    if ps.size == 0:
        return 0.0
    terms = 1.0 / ps.astype(np.float64)
    if compensated:
        return math.fsum(terms)
    return float(np.cumsum(terms)[-1])

