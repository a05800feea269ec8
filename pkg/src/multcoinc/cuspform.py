"""Exact Fourier coefficients of the weight-12 discriminant form and checks on them.

``Delta = q prod_{n >= 1} (1 - q^n)^24``. The Euler product comes from the
pentagonal number theorem; its 24th power is built as
``E^24 = E^16 * E^8`` from repeated squaring, each product done exactly by
packing the series into one big integer (Kronecker substitution).
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path

import gmpy2
import numpy as np

from multcoinc.errors import BudgetExceeded, InvalidArgument
from multcoinc.primes import PrimeTable, build_prime_table

MAX_N = 10**6
CACHE_MAGIC = b"TAUC"
CACHE_VERSION = 1
_HEADER = struct.Struct("<4sHHQ")


@dataclass(frozen=True, eq=False)
class CuspFormCoefficients:
    """``a[n]`` exact for ``1 <= n <= N`` (``a[0] = 0``); ``lam[n] = a[n] / n^{(k-1)/2}``."""

    k: int
    N: int
    a: tuple[int, ...] = field(repr=False)
    lam: np.ndarray = field(repr=False)

    @cached_property
    def table(self) -> PrimeTable:
        return build_prime_table(max(self.N, 2))

    @cached_property
    def primes(self) -> np.ndarray:
        return self.table.primes_upto(self.N)


def pentagonal_series(N: int) -> list[int]:
    """Coefficients of ``prod_{n >= 1} (1 - q^n)`` up to ``q^{N-1}``."""
    out = [0] * N
    k = 0
    while True:
        hit = False
        for j in ((k, -k) if k else (0,)):
            e = j * (3 * j - 1) // 2
            if e < N:
                out[e] = -1 if j % 2 else 1
                hit = True
        if not hit and k:
            break
        k += 1
    return out


def _slot_bytes(a: list[int], b: list[int]) -> int:
    ma = max((abs(v) for v in a), default=0)
    mb = max((abs(v) for v in b), default=0)
    bits = ma.bit_length() + mb.bit_length() + min(len(a), len(b)).bit_length() + 2
    return (bits + 7) // 8


def _pack(vals: list[int], nbytes: int) -> gmpy2.mpz:
    """``sum vals[i] 2^{8 nbytes i}`` for signed ``vals``."""
    pos = b"".join((v if v > 0 else 0).to_bytes(nbytes, "little") for v in vals)
    neg = b"".join((-v if v < 0 else 0).to_bytes(nbytes, "little") for v in vals)
    return gmpy2.mpz(int.from_bytes(pos, "little")) - gmpy2.mpz(int.from_bytes(neg, "little"))


def _unpack(value: gmpy2.mpz, count: int, nbytes: int) -> list[int]:
    # bias every slot by 2^(8 nbytes - 1) so slots are non-negative and carry-free
    half = 1 << (8 * nbytes - 1)
    bias = int.from_bytes(half.to_bytes(nbytes, "little") * count, "little")
    raw = int(value + bias).to_bytes(nbytes * count + 1, "little")
    return [int.from_bytes(raw[i * nbytes : (i + 1) * nbytes], "little") - half for i in range(count)]


def series_mul(a: list[int], b: list[int], N: int) -> list[int]:
    """First ``N`` coefficients of the product of two integer power series."""
    a, b = a[:N], b[:N]
    nbytes = _slot_bytes(a, b)
    prod = _pack(a, nbytes) * _pack(b, nbytes)
    # the full product has len(a) + len(b) - 1 slots; reading only N of them
    # would leave higher slots in the integer, so mask them off first
    prod = gmpy2.f_mod_2exp(prod + (1 << (8 * nbytes * N - 1)), 8 * nbytes * N) - (1 << (8 * nbytes * N - 1))
    return _unpack(prod, N, nbytes)


def _hecke_violations(a: list[int], N: int, k: int, primes: np.ndarray) -> list[int]:
    bad = []
    w = k - 1
    for p in primes:
        p = int(p)
        if p * p > N:
            break
        pk_prev, pk = 1, p
        while pk * p <= N:
            if a[pk * p] != a[p] * a[pk] - p**w * a[pk_prev]:
                bad.append(pk * p)
            pk_prev, pk = pk, pk * p
    return bad


def _multiplicative_violations(a: list[int], N: int, table: PrimeTable) -> list[int]:
    """``n <= N`` with ``a(n) != a(p^e) a(n / p^e)`` for ``p^e`` the smallest-prime part of ``n``."""
    dec = table.decomposition
    head, rest = dec.head, dec.rest
    bad = []
    for n in range(6, N + 1):
        r = int(rest[n])
        if r > 1 and a[n] != a[int(head[n])] * a[r]:
            bad.append(n)
    return bad


@lru_cache(maxsize=4)
def delta_coefficients(N: int) -> CuspFormCoefficients:
    """Exact ``tau(n)`` for ``n <= N``, verified against the prime-power recursion and multiplicativity."""
    if N < 1:
        raise InvalidArgument("N must be positive")
    if N > MAX_N:
        raise BudgetExceeded(f"N={N} exceeds the big-integer budget {MAX_N}")
    E = pentagonal_series(N)
    E2 = series_mul(E, E, N)
    E4 = series_mul(E2, E2, N)
    E8 = series_mul(E4, E4, N)
    E16 = series_mul(E8, E8, N)
    E24 = series_mul(E16, E8, N)
    a = [0] + E24[:N]
    return _finish(12, N, a)


def _finish(k: int, N: int, a: list[int]) -> CuspFormCoefficients:
    if a[1] != 1:
        raise AssertionError("leading coefficient is not 1")
    n = np.arange(N + 1, dtype=np.float64)
    n[0] = 1.0
    lam = np.array([float(v) for v in a]) / n ** ((k - 1) / 2)
    lam.setflags(write=False)
    coeffs = CuspFormCoefficients(k, N, tuple(a), lam)
    bad = _hecke_violations(a, N, k, coeffs.primes)
    if bad:
        raise AssertionError(f"prime-power recursion fails at {bad[:5]}")
    bad = _multiplicative_violations(a, N, coeffs.table)
    if bad:
        raise AssertionError(f"multiplicativity fails at {bad[:5]}")
    return coeffs


def save_coefficients(coeffs: CuspFormCoefficients, path: str | Path) -> None:
    """Header ``magic, version, weight, N`` then each ``a(n)`` as a u32 length and signed little-endian bytes."""
    parts = [_HEADER.pack(CACHE_MAGIC, CACHE_VERSION, coeffs.k, coeffs.N)]
    for v in coeffs.a[1:]:
        b = v.to_bytes((v.bit_length() + 8) // 8, "little", signed=True)
        parts.append(struct.pack("<I", len(b)))
        parts.append(b)
    Path(path).write_bytes(b"".join(parts))


def load_coefficients(path: str | Path) -> CuspFormCoefficients:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise InvalidArgument("coefficient cache is truncated")
    magic, version, k, N = _HEADER.unpack_from(data)
    if magic != CACHE_MAGIC or version != CACHE_VERSION:
        raise InvalidArgument("not a coefficient cache of a supported version")
    a = [0]
    pos = _HEADER.size
    for _ in range(N):
        (ln,) = struct.unpack_from("<I", data, pos)
        pos += 4
        a.append(int.from_bytes(data[pos : pos + ln], "little", signed=True))
        pos += ln
    if pos != len(data):
        raise InvalidArgument("coefficient cache has trailing bytes")
    return _finish(k, N, a)


def cached_delta_coefficients(N: int, cache_dir: str | Path | None) -> CuspFormCoefficients:
    """:func:`delta_coefficients`, read from or written to ``cache_dir`` when given."""
    if cache_dir is None:
        return delta_coefficients(N)
    path = Path(cache_dir) / f"delta_{N}.bin"
    if path.exists():
        return load_coefficients(path)
    coeffs = delta_coefficients(N)
    path.parent.mkdir(parents=True, exist_ok=True)
    save_coefficients(coeffs, path)
    return coeffs


@dataclass(frozen=True)
class DeligneReport:
    max_ratio: float
    argmax: int
    exact_ok: bool


def deligne_check(coeffs: CuspFormCoefficients) -> DeligneReport:
    """``max_p |a(p)| / (2 p^{(k-1)/2})``; ``exact_ok`` compares ``a(p)^2 <= 4 p^{k-1}`` in integers."""
    w = coeffs.k - 1
    best, arg, ok = 0.0, 0, True
    for p in coeffs.primes:
        p = int(p)
        v = coeffs.a[p]
        if v * v > 4 * p**w:
            ok = False
        r = abs(float(coeffs.lam[p])) / 2.0
        if r > best:
            best, arg = r, p
    return DeligneReport(best, arg, ok)


def rs_pnt_ratio(coeffs: CuspFormCoefficients, X: int) -> float:
    """``(sum_{p <= X} lam(p)^2 log p) / X``."""
    if not (2 <= X <= coeffs.N):
        raise InvalidArgument(f"X must lie in [2, N={coeffs.N}]")
    p = coeffs.table.primes_upto(X)
    lam = coeffs.lam[p]
    return float(np.sum(lam * lam * np.log(p.astype(np.float64)))) / X


@dataclass(frozen=True)
class DyadicCheck:
    y: int
    log_sum: float
    bound: float
    holds: bool
    below_y0: bool


def dyadic_ne1_logsum(coeffs: CuspFormCoefficients, y: int, y0: int = 100) -> DyadicCheck:
    """``sum_{y <= p <= 2y, |a(p)| != 1} log p`` against ``y / 5``."""
    if y < 2 or 2 * y > coeffs.N:
        raise InvalidArgument(f"need 2 <= y and 2y <= N={coeffs.N}")
    p = coeffs.primes
    p = p[(p >= y) & (p <= 2 * y)]
    if p.size == 0:
        raise AssertionError(f"no primes in [{y}, {2 * y}]")
    keep = np.array([abs(coeffs.a[int(q)]) != 1 for q in p], dtype=bool)
    s = float(np.sum(np.log(p[keep].astype(np.float64))))
    return DyadicCheck(y, s, y / 5, s >= y / 5, y < y0)


def ne1_reciprocal_sum(coeffs: CuspFormCoefficients, x: int) -> tuple[float, float]:
    """``sum_{p <= x, |a(p)| != 1} 1/p`` and the prediction ``log log x / (10 log 2)``."""
    if not (3 <= x <= coeffs.N):
        raise InvalidArgument(f"x must lie in [3, N={coeffs.N}]")
    p = coeffs.table.primes_upto(x)
    keep = np.array([abs(coeffs.a[int(q)]) != 1 for q in p], dtype=bool)
    return float(np.sum(1.0 / p[keep])), math.log(math.log(x)) / (10 * math.log(2))
