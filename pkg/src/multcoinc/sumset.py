"""Grid carriers for sumset covering and the approximate Cauchy equation.

Real sets and functions are discretised on ``{j * step : |j| <= half}``;
every statement about ``[-D, D]`` is checked up to one grid cell. Points are
rounded to the grid with ``floor(alpha / step + 1/2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from multcoinc.errors import BudgetExceeded, InvalidArgument

MAX_GRID = 10**7


def grid_index(alpha: float, step: float) -> int:
    return int(math.floor(alpha / step + 0.5))


@dataclass(frozen=True, eq=False)
class GridSet:
    """A subset of the grid ``{j * step : |j| <= half}`` given by a membership mask."""

    half: int
    step: float
    members: np.ndarray

    def __post_init__(self):
        if self.members.shape != (2 * self.half + 1,):
            raise InvalidArgument("membership mask does not match the grid size")

    @classmethod
    def build(cls, bound: float, step: float, members=None) -> "GridSet":
        if step <= 0 or bound < 0:
            raise InvalidArgument("need step > 0 and bound >= 0")
        half = int(round(bound / step))
        mask = np.zeros(2 * half + 1, dtype=bool) if members is None else np.asarray(members, dtype=bool)
        return cls(half, float(step), mask)

    @classmethod
    def from_intervals(cls, bound: float, step: float, intervals) -> "GridSet":
        """Grid points lying in any closed interval ``(lo, hi)``."""
        g = cls.build(bound, step)
        a = g.alphas
        mask = np.zeros(a.size, dtype=bool)
        for lo, hi in intervals:
            mask |= (a >= lo - 1e-12 * step) & (a <= hi + 1e-12 * step)
        return cls(g.half, g.step, mask)

    @property
    def bound(self) -> float:
        return self.half * self.step

    @property
    def alphas(self) -> np.ndarray:
        return np.arange(-self.half, self.half + 1) * self.step

    @property
    def offsets(self) -> np.ndarray:
        """Signed grid indices of the members, increasing."""
        return np.flatnonzero(self.members) - self.half

    @property
    def count(self) -> int:
        return int(self.members.sum())

    @property
    def measure(self) -> float:
        return self.count * self.step

    def contains(self, alpha: float) -> bool:
        j = grid_index(alpha, self.step)
        return abs(j) <= self.half and bool(self.members[j + self.half])

    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.members, self.members[::-1]))

    def restrict(self, half: int) -> "GridSet":
        """Intersection with ``[-half*step, half*step]``."""
        if half >= self.half:
            pad = half - self.half
            return GridSet(half, self.step, np.pad(self.members, pad))
        return GridSet(half, self.step, self.members[self.half - half : self.half + half + 1].copy())


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real values on the grid ``{j * step : |j| <= half}``."""

    half: int
    step: float
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (2 * self.half + 1,):
            raise InvalidArgument("value array does not match the grid size")
        if not np.all(np.isfinite(self.values)):
            raise InvalidArgument("grid function has non-finite values")

    @classmethod
    def from_callable(cls, bound: float, step: float, fn) -> "GridFunction":
        half = int(round(bound / step))
        a = np.arange(-half, half + 1) * step
        return cls(half, float(step), np.asarray(fn(a), dtype=np.float64) * np.ones(a.size))

    @property
    def bound(self) -> float:
        return self.half * self.step

    @property
    def alphas(self) -> np.ndarray:
        return np.arange(-self.half, self.half + 1) * self.step


def _add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.size * b.size <= 1 << 16:
        return np.convolve(a.astype(np.int64), b.astype(np.int64)) > 0
    return fftconvolve(a.astype(np.float64), b.astype(np.float64)) > 0.5


def _check_size(half: int) -> None:
    if 2 * half + 1 > MAX_GRID:
        raise BudgetExceeded(f"sumset grid of {2 * half + 1} points exceeds the budget {MAX_GRID}")


def iterated_sumset(Y: GridSet, ell: int) -> GridSet:
    """``ell * Y = {y_1 + ... + y_ell}`` on the grid ``[-ell*D, ell*D]``."""
    if ell < 1:
        raise InvalidArgument(f"ell must be a positive integer, got {ell}")
    _check_size(ell * Y.half)
    result = None
    power = Y.members
    e = ell
    while e:
        if e & 1:
            result = power if result is None else _add(result, power)
        e >>= 1
        if e:
            power = _add(power, power)
    return GridSet(ell * Y.half, Y.step, np.asarray(result, dtype=bool))


def cover_check(Y: GridSet, ell: int) -> bool:
    """Whether every grid point of ``[-D, D]`` lies in ``ell * Y``."""
    if Y.count == 0:
        raise InvalidArgument("Y must be non-empty")
    S = iterated_sumset(Y, ell)
    c = S.half
    return bool(S.members[c - Y.half : c + Y.half + 1].all())


def covering_ell(Y: GridSet) -> int:
    """The covering length ``floor(12 D / measure(Y))``."""
    if Y.measure <= 0:
        raise InvalidArgument("Y has measure zero")
    return int(math.floor(12 * Y.bound / Y.measure))


def minimal_cover_ell(Y: GridSet, ell_max: int) -> int | None:
    """Smallest ``ell <= ell_max`` with ``cover_check(Y, ell)``, else ``None``."""
    if Y.count == 0:
        raise InvalidArgument("Y must be non-empty")
    _check_size(ell_max * Y.half)
    S = Y.members
    for ell in range(1, ell_max + 1):
        if ell > 1:
            S = _add(S, Y.members)
        c = ell * Y.half
        if S[c - Y.half : c + Y.half + 1].all():
            return ell
    return None


class Decomposer:
    """Lexicographically smallest ``k``-term decompositions over a fixed ``X``.

    Keeps the reachable sets ``0*X, 1*X, ..., (k-1)*X`` so repeated queries
    cost ``O(k |X|)`` each.
    """

    def __init__(self, X: GridSet, k: int):
        if k < 1:
            raise InvalidArgument(f"k must be a positive integer, got {k}")
        if X.count == 0:
            raise InvalidArgument("X must be non-empty")
        _check_size(k * X.half)
        self.X = X
        self.k = k
        self.offsets = X.offsets
        reach = [np.ones(1, dtype=bool)]
        for _ in range(k - 1):
            reach.append(_add(reach[-1], X.members))
        self._reach = reach
        # reach[r] zero-padded to half-width (r + 2) * half: queries from
        # decompose_many never leave that window, so they index without masking
        h = X.half
        self._padded = [np.pad(R, 2 * h) for R in reach]

    def _in_reach(self, r: int, targets: np.ndarray) -> np.ndarray:
        half = r * self.X.half
        ok = np.abs(targets) <= half
        out = np.zeros(targets.shape, dtype=bool)
        out[ok] = self._reach[r][targets[ok] + half]
        return out

    def _first_hit(self, r: int, target: int) -> int | None:
        # smallest offsets first, in growing chunks, so typical queries stop early
        lo, width = 0, 64
        offs = self.offsets
        while lo < offs.size:
            chunk = offs[lo : lo + width]
            hit = np.flatnonzero(self._in_reach(r, target - chunk))
            if hit.size:
                return int(chunk[hit[0]])
            lo += width
            width *= 4
        return None

    def decompose_index(self, target: int) -> list[int] | None:
        picks = []
        for i in range(self.k):
            j = self._first_hit(self.k - 1 - i, target)
            if j is None:
                return None
            picks.append(j)
            target -= j
        return picks

    def decompose_many(self, targets: np.ndarray) -> np.ndarray:
        """Row ``i`` is :meth:`decompose_index` of ``targets[i]``, computed for all targets at once.

        Raises :class:`InvalidArgument` if any target has no decomposition.
        """
        rest = np.asarray(targets, dtype=np.int64).copy()
        if rest.size and int(np.max(np.abs(rest))) > self.k * self.X.half:
            raise InvalidArgument(f"targets must lie within {self.k} * X's range")
        picks = np.empty((rest.size, self.k), dtype=np.int64)
        for i in range(self.k):
            r = self.k - 1 - i
            open_ = np.ones(rest.size, dtype=bool)
            pad_r = (r + 2) * self.X.half
            lo, width = 0, 16
            while lo < self.offsets.size:
                idx = np.flatnonzero(open_)
                if idx.size == 0:
                    break
                width = max(1, min(width, (1 << 22) // idx.size))
                chunk = self.offsets[lo : lo + width]
                ok = self._padded[r][(rest[idx, None] + pad_r) - chunk[None, :]]
                hit = ok.any(axis=1)
                done = idx[hit]
                picks[done, i] = chunk[ok[hit].argmax(axis=1)]
                open_[done] = False
                lo += width
                width *= 2
            if open_.any():
                bad = int(np.asarray(targets)[np.flatnonzero(open_)[0]])
                raise InvalidArgument(f"grid point {bad} has no {self.k}-term decomposition over X")
            rest -= picks[:, i]
        return picks

    def decompose(self, beta: float) -> list[float]:
        X = self.X
        if abs(beta) > self.k * X.bound + X.step / 2:
            raise InvalidArgument(f"beta={beta} lies outside [-{self.k * X.bound}, {self.k * X.bound}]")
        picks = self.decompose_index(grid_index(beta, X.step))
        if picks is None:
            raise InvalidArgument(f"beta={beta} has no {self.k}-term decomposition over X on this grid")
        return [j * X.step for j in picks]


def sum_decompose(beta: float, X: GridSet, k: int) -> list[float]:
    """Lexicographically smallest ``(alpha_1, ..., alpha_k)`` in ``X^k`` summing to ``beta``."""
    return Decomposer(X, k).decompose(beta)


@dataclass(frozen=True)
class CauchyFit:
    c: float
    sup_error: float
    witnessed_K: float
    grid_slack: float
    hypothesis_ok: bool

    @property
    def guarantee_holds(self) -> bool:
        return self.sup_error <= 3 * self.witnessed_K + self.grid_slack + 1e-12


def witnessed_cauchy_defect(phi: GridFunction) -> float:
    """``max |phi(a1 + a2) - phi(a1) - phi(a2)|`` over grid pairs with ``a1 + a2`` on the grid."""
    v = phi.values
    n = phi.half
    size = 2 * n + 1
    worst = 0.0
    rows = max(1, (1 << 22) // size)
    j = np.arange(-n, n + 1)
    for start in range(-n, n + 1, rows):
        i = np.arange(start, min(start + rows, n + 1))[:, None]
        s = i + j[None, :]
        ok = np.abs(s) <= n
        d = np.abs(v[np.clip(s, -n, n) + n] - v[i + n] - v[j + n][None, :])
        worst = max(worst, float(np.max(np.where(ok, d, 0.0))))
    return worst


def approx_cauchy_fit(phi: GridFunction, K: float | None = None) -> CauchyFit:
    """Linear fit ``c = phi(B)/B`` with its sup error and the measured Cauchy defect."""
    if phi.half == 0:
        raise InvalidArgument("grid function needs B > 0")
    B = phi.bound
    c = float(phi.values[-1]) / B
    sup_error = float(np.max(np.abs(phi.values - c * phi.alphas)))
    wk = witnessed_cauchy_defect(phi)
    slack = 3.0 * float(np.max(np.abs(np.diff(phi.values))))
    return CauchyFit(c, sup_error, wk, slack, True if K is None else wk <= K)
