"""Dirichlet characters in Conrey labelling.

A character mod ``q`` is addressed by its Conrey index ``a`` (``1 <= a <= q``,
``gcd(a, q) = 1``; ``a = 1`` is principal). Values are materialised once as a
length-``q`` complex table indexed by ``n mod q``.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from multcoinc.errors import InvalidArgument

MAX_MODULUS = 10**5


def _factor_small(q: int) -> list[tuple[int, int]]:
    out = []
    d = 2
    while d * d <= q:
        if q % d == 0:
            e = 0
            while q % d == 0:
                q //= d
                e += 1
            out.append((d, e))
        d += 1
    if q > 1:
        out.append((q, 1))
    return out


def _primitive_root(p: int, e: int) -> int:
    """Smallest primitive root mod ``p**e`` for odd prime ``p``."""
    phi = p - 1
    factors = [r for r, _ in _factor_small(phi)]
    for g in range(2, p):
        if all(pow(g, phi // r, p) != 1 for r in factors):
            if e == 1 or pow(g, p - 1, p * p) != 1:
                return g
            return g + p  # g + p is primitive mod p^2 when g is not
    raise AssertionError("unreachable")


def _dlog_table(g: int, m: int, order: int) -> np.ndarray:
    """``log[n]`` with ``g**log[n] == n (mod m)``; -1 where undefined."""
    log = np.full(m, -1, dtype=np.int64)
    v = 1
    for j in range(order):
        log[v] = j
        v = v * g % m
    return log


def _component(p: int, e: int, a: int) -> np.ndarray:
    """Conrey character ``chi_{p^e}(a, .)`` as a complex table of length ``p**e``."""
    m = p**e
    vals = np.zeros(m, dtype=np.complex128)
    if p != 2:
        phi = m // p * (p - 1)
        log = _dlog_table(_primitive_root(p, e), m, phi)
        la = int(log[a % m])
        units = log >= 0
        vals[units] = np.exp(2j * np.pi * la * log[units] / phi)
        return vals
    if e == 1:
        vals[1] = 1.0
        return vals
    n = np.arange(m)
    odd = n % 2 == 1
    if e == 2:
        sa = 1 if a % 4 == 3 else 0
        sn = (n % 4 == 3).astype(np.int64)
        vals[odd] = np.where(sa * sn[odd] % 2 == 1, -1.0, 1.0)
        return vals
    # n = (+-1) * 5^k mod 2^e
    order = m // 4
    log5 = _dlog_table(5, m, order)

    def split(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        s = (x % 4 == 3).astype(np.int64)
        y = np.where(s == 1, (m - x) % m, x)
        return s, log5[y]

    sa, ka = split(np.array([a % m]))
    sn, kn = split(n[odd])
    vals[odd] = np.exp(2j * np.pi * (sa[0] * sn / 2.0 + ka[0] * kn / order))
    return vals


@lru_cache(maxsize=256)
def _character_table(q: int, a: int) -> np.ndarray:
    n = np.arange(q)
    vals = np.ones(q, dtype=np.complex128)
    for p, e in _factor_small(q):
        comp = _component(p, e, a)
        vals *= comp[n % p**e]
    if q == 1:
        vals[:] = 1.0
    # snap values to exact units where they are real
    vals.real[np.abs(vals.real) < 1e-15] = 0.0
    vals.imag[np.abs(vals.imag) < 1e-15] = 0.0
    vals.setflags(write=False)
    return vals


def check_character(q: int, a: int) -> None:
    if not (1 <= q <= MAX_MODULUS):
        raise InvalidArgument(f"character modulus must be in [1, {MAX_MODULUS}], got {q}")
    if q == 1:
        if a != 1:
            raise InvalidArgument("the only character mod 1 has index 1")
        return
    if not (1 <= a <= q) or math.gcd(a, q) != 1:
        raise InvalidArgument(f"Conrey index {a} is not a unit mod {q}")


def character_table(q: int, a: int) -> np.ndarray:
    """Values ``chi_q(a, n)`` for ``n = 0 .. q-1``."""
    check_character(q, a)
    return _character_table(q, a % q if q > 1 else 1)


def character_indices(q: int) -> list[int]:
    if q == 1:
        return [1]
    return [a for a in range(1, q) if math.gcd(a, q) == 1]


@lru_cache(maxsize=4096)
def conductor(q: int, a: int) -> int:
    """Smallest ``d | q`` such that ``chi`` is trivial on units ``= 1 mod d``."""
    vals = character_table(q, a)
    n = np.arange(q)
    units = np.array([math.gcd(int(k), q) == 1 for k in n])
    for d in sorted(d for d in range(1, q + 1) if q % d == 0):
        sel = units & (n % d == 1 % d)
        if np.allclose(vals[sel], 1.0, atol=1e-9):
            return d
    return q


def primitive_characters(bound: int) -> list[tuple[int, int]]:
    """All primitive ``(q, a)`` with ``q <= bound``, ordered by modulus then index."""
    return [(q, a) for q in range(1, bound + 1) for a in character_indices(q) if conductor(q, a) == q]
