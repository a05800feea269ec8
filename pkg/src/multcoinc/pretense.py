"""Pretentious distances and an exhaustive twisted-character search.

``D(f, g; x)^2 = sum_{p <= x} (1 - Re f(p) conj(g(p))) / p`` is always computed
by direct summation over the table's primes.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from multcoinc import characters
from multcoinc.errors import BudgetExceeded, InvalidArgument
from multcoinc.multfunc import MultiplicativeFunction, check_unit_bounded
from multcoinc.primes import PrimeTable

MAX_CONDUCTOR = 50
MAX_T_GRID = 10**6
# elements per phasor block (rows x primes); bounds peak memory of the search
BLOCK_ELEMENTS = 1 << 22
TIE_TOL = 1e-12


@dataclass(frozen=True)
class PretenseResult:
    distance_squared: float
    t: float
    character_modulus: int
    character_index: int


def _primes(table: PrimeTable, x: int) -> np.ndarray:
    if x > table.limit:
        raise InvalidArgument(f"x={x} exceeds table limit {table.limit}")
    return table.primes_upto(x)


def distance_squared_from_values(fp: np.ndarray, gp: np.ndarray, primes: np.ndarray) -> float:
    terms = (1.0 - np.real(fp * np.conj(gp))) / primes
    return max(float(np.sum(terms)), 0.0)


def distance_squared(f: MultiplicativeFunction, g: MultiplicativeFunction, x: int, table: PrimeTable) -> float:
    """``D(f, g; x)^2`` for 1-bounded ``f`` and ``g``."""
    ps = _primes(table, x)
    fp = check_unit_bounded(f, ps)
    gp = check_unit_bounded(g, ps)
    return distance_squared_from_values(fp, gp, ps)


def nit_distance_profile(t: float, x: int, table: PrimeTable) -> tuple[float, float]:
    """Measured ``D(n^{it}, 1; x)^2`` and its predicted size.

    The prediction is ``log(1 + |t| log x)`` for ``|t| <= 10`` and
    ``(1/3) log log x`` beyond, where only a lower bound is expected.
    """
    ps = _primes(table, x)
    measured = max(float(np.sum((1.0 - np.cos(t * np.log(ps))) / ps)), 0.0)
    lx = math.log(x)
    predicted = math.log1p(abs(t) * lx) if abs(t) <= 10 else math.log(lx) / 3.0
    return measured, predicted


def sparse_set_sum(
    f: MultiplicativeFunction, g: MultiplicativeFunction, eta: float, x: int, table: PrimeTable
) -> float:
    """Reciprocal sum over ``p <= x`` with ``|f(p) - g(p)| > eta``."""
    ps = _primes(table, x)
    gap = np.abs(f.at_primes(ps) - g.at_primes(ps))
    return float(np.sum(1.0 / ps[gap > eta]))


def t_grid(t_max: float, t_step: float) -> np.ndarray:
    """Symmetric grid ``j * t_step`` for ``|j| <= round(t_max / t_step)``; contains 0 exactly."""
    if t_step <= 0 or t_max < 0:
        raise InvalidArgument("t_step must be positive and t_max non-negative")
    half = int(round(t_max / t_step))
    if 2 * half + 1 > MAX_T_GRID:
        raise BudgetExceeded(
            f"t-grid of {2 * half + 1} points exceeds the budget of {MAX_T_GRID} "
            f"(t_max={t_max}, t_step={t_step})"
        )
    return np.arange(-half, half + 1) * t_step


def best_pretender(
    f: MultiplicativeFunction,
    x: int,
    conductor_bound: int = 10,
    t_max: float = 100.0,
    t_step: float = 0.01,
    table: PrimeTable | None = None,
    threads: int = 1,
) -> PretenseResult:
    """Minimise ``D(f, psi(n) n^{it}; x)^2`` over primitive ``psi`` and a ``t`` grid.

    ``psi`` runs over all primitive characters of conductor ``<= conductor_bound``
    and ``t`` over :func:`t_grid`. Ties (within ``1e-12``) go to the smaller
    conductor, then smaller ``|t|``, then smaller ``t``, then smaller index.
    """
    if table is None:
        raise InvalidArgument("a prime table is required")
    ps = _primes(table, x)
    return best_pretender_values(check_unit_bounded(f, ps), ps, conductor_bound, t_max, t_step, threads)


def best_pretender_values(
    fp: np.ndarray,
    ps: np.ndarray,
    conductor_bound: int = 10,
    t_max: float = 100.0,
    t_step: float = 0.01,
    threads: int = 1,
) -> PretenseResult:
    """:func:`best_pretender` on precomputed values ``fp`` at the primes ``ps``."""
    if not (1 <= conductor_bound <= MAX_CONDUCTOR):
        raise BudgetExceeded(f"conductor_bound={conductor_bound} outside the budget [1, {MAX_CONDUCTOR}]")
    ts = t_grid(t_max, t_step)
    chars = characters.primitive_characters(conductor_bound)
    if ps.size == 0:
        return PretenseResult(0.0, 0.0, 1, 1)

    total = float(np.sum(1.0 / ps))
    logp = np.log(ps)
    weights = np.empty((ps.size, len(chars)), dtype=np.complex128)
    w = fp / ps
    for j, (q, a) in enumerate(chars):
        weights[:, j] = w * np.conj(characters.character_table(q, a)[ps % q])

    rows = max(1, min(ts.size, BLOCK_ELEMENTS // ps.size))
    steps = np.exp(-1j * np.outer(np.arange(rows) * t_step, logp))
    starts = list(range(0, ts.size, rows))

    def block(start: int) -> np.ndarray:
        n = min(rows, ts.size - start)
        phase = np.exp(-1j * ts[start] * logp)
        return total - np.real((steps[:n] * phase) @ weights)

    best = math.inf
    cands: list[tuple[float, int, int]] = []

    def absorb(start: int, vals: np.ndarray) -> None:
        nonlocal best, cands
        lo = float(vals.min())
        if lo < best - TIE_TOL:
            cands = [c for c in cands if c[0] <= lo + TIE_TOL]
            best = lo
        ti, ci = np.nonzero(vals <= best + TIE_TOL)
        cands.extend((float(vals[i, j]), start + int(i), int(j)) for i, j in zip(ti, ci))
        cands = [c for c in cands if c[0] <= best + TIE_TOL]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for start, vals in zip(starts, pool.map(block, starts)):
                absorb(start, vals)
    else:
        for start in starts:
            absorb(start, block(start))

    def key(c):
        _, ti, ci = c
        q, a = chars[ci]
        return (q, abs(ts[ti]), ts[ti], a)

    d2, ti, ci = min(cands, key=key)
    q, a = chars[ci]
    return PretenseResult(max(d2, 0.0), float(ts[ti]), q, a)


def twisted_character(q: int, a: int, t: float) -> MultiplicativeFunction:
    """``psi(n) n^{it}`` as a multiplicative function."""
    from multcoinc.multfunc import character, nit, product

    if t == 0.0:
        return character(q, a)
    return product(character(q, a), nit(t))
