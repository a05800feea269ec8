"""Logarithmic densities and correlations along affine pairs ``(an + b, cn + d)``.

All sums run over ``n <= x`` in increasing order with weight ``1/n`` and are
normalised by the harmonic number ``H_x = sum_{n <= x} 1/n``. This keeps
indicator averages inside ``[0, 1]``; dividing by ``log x`` instead overshoots
by ``(log x + 0.577) / log x``, about 3.6% at ``x = 10^7``.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import sici

from multcoinc.errors import BudgetExceeded, InvalidArgument
from multcoinc.multfunc import MultiplicativeFunction, mf_values, squarefree_twist
from multcoinc.primes import PrimeTable
from multcoinc.sumset import GridSet

DEFAULT_TOLERANCE = 1e-9
MAX_SCAN_GRID = 10**5
# (grid points) x (distinct log-ratios) evaluated by a scan
SCAN_BUDGET = 4 * 10**9


@dataclass(frozen=True)
class AffinePair:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        a, b, c, d = self.a, self.b, self.c, self.d
        if a < 1 or c < 1:
            raise InvalidArgument("a and c must be positive")
        if a * d - b * c == 0:
            raise InvalidArgument("ad - bc must be non-zero")
        if math.gcd(a, b) != 1 or math.gcd(c, d) != 1:
            raise InvalidArgument("need gcd(a, b) = gcd(c, d) = 1")

    @classmethod
    def shift(cls, h: int) -> "AffinePair":
        return cls(1, 0, 1, h)

    @classmethod
    def parse(cls, text: str) -> "AffinePair":
        try:
            a, b, c, d = (int(v) for v in text.split(","))
        except ValueError:
            raise InvalidArgument(f"affine pair must be 'a,b,c,d', got {text!r}") from None
        return cls(a, b, c, d)

    @property
    def determinant(self) -> int:
        return self.a * self.d - self.b * self.c

    def __str__(self) -> str:
        return f"{self.a},{self.b},{self.c},{self.d}"


@lru_cache(maxsize=64)
def harmonic(x: int) -> float:
    """``H_x``, summed in increasing order."""
    return float(np.sum(1.0 / np.arange(1, x + 1, dtype=np.float64)))


@dataclass(frozen=True)
class DensityReport:
    """``log_sum = sum 1/n`` over the counted ``n``; ``normalized = log_sum / H_x``.

    ``per_log_x`` is ``log_sum / log x`` for comparison.
    """

    x: int
    log_sum: float
    normalized: float
    sample_count: int
    per_log_x: float


@dataclass(frozen=True)
class PairValues:
    n: np.ndarray
    left: np.ndarray
    right: np.ndarray


def pair_values(
    f1: MultiplicativeFunction, f2: MultiplicativeFunction, pair: AffinePair, x: int, table: PrimeTable
) -> PairValues:
    """``f1(an + b)`` and ``f2(cn + d)`` for the ``n <= x`` with both arguments >= 1."""
    if x < 2:
        raise InvalidArgument("x must be at least 2")
    top1 = pair.a * x + pair.b
    top2 = pair.c * x + pair.d
    top = max(top1, top2)
    if top > table.factor_limit:
        raise InvalidArgument(f"max(ax+b, cx+d) = {top} exceeds the table's factorisation limit {table.factor_limit}")
    n = np.arange(1, x + 1, dtype=np.int64)
    u = pair.a * n + pair.b
    v = pair.c * n + pair.d
    keep = (u >= 1) & (v >= 1)
    n, u, v = n[keep], u[keep], v[keep]
    top1, top2 = max(top1, 1), max(top2, 1)
    if f1 is f2 or f1.name == f2.name:
        vals = mf_values(f1, max(top1, top2), table)
        return PairValues(n, vals[u], vals[v])
    return PairValues(n, mf_values(f1, top1, table)[u], mf_values(f2, top2, table)[v])


def _as_complex(C) -> complex:
    C = complex(C)
    if C == 0:
        raise InvalidArgument("C must be non-zero")
    return C


def default_tolerance(f1: MultiplicativeFunction, f2: MultiplicativeFunction, C: complex) -> float:
    """Exact comparison for integer-valued functions and Gaussian-integer ``C``."""
    C = complex(C)
    if f1.integer_valued and f2.integer_valued and C.real.is_integer() and C.imag.is_integer():
        return 0.0
    return DEFAULT_TOLERANCE


def coincidence_mask(left: np.ndarray, right: np.ndarray, C: complex, tolerance: float) -> np.ndarray:
    """``f1 = C f2`` with both sides non-zero, under the relative ``tolerance`` policy."""
    scaled = C * right if C != 1 else right
    both = (left != 0) & (right != 0)
    if tolerance == 0:
        return both & (left == scaled)
    return both & (np.abs(left - scaled) <= tolerance * (1.0 + np.abs(scaled)))


def log_density_equal(
    f1: MultiplicativeFunction,
    f2: MultiplicativeFunction,
    pair: AffinePair,
    C,
    x: int,
    table: PrimeTable,
    tolerance: float | None = None,
) -> DensityReport:
    """``(1/H_x) sum_{n <= x} 1_{f1(an+b) = C f2(cn+d) != 0} / n``."""
    C = _as_complex(C)
    if tolerance is None:
        tolerance = default_tolerance(f1, f2, C)
    pv = pair_values(f1, f2, pair, x, table)
    hit = coincidence_mask(pv.left, pv.right, C, tolerance)
    log_sum = float(np.sum(1.0 / pv.n[hit]))
    return DensityReport(x, log_sum, log_sum / harmonic(x), int(hit.sum()), log_sum / math.log(x))


def _check_bounded(vals: np.ndarray, name: str) -> None:
    if vals.size and float(np.max(np.abs(vals))) > 1.0 + 1e-9:
        raise InvalidArgument(f"{name} is not 1-bounded")


def log_avg_correlation(
    g1: MultiplicativeFunction, g2: MultiplicativeFunction, pair: AffinePair, x: int, table: PrimeTable
) -> complex:
    """``(1/H_x) sum_{n <= x} g1(an+b) g2(cn+d) / n`` for 1-bounded ``g1, g2``."""
    pv = pair_values(g1, g2, pair, x, table)
    _check_bounded(pv.left, g1.name)
    _check_bounded(pv.right, g2.name)
    return complex(np.sum(pv.left * pv.right / pv.n)) / harmonic(x)


def _cos_tail(omega: float, L: float) -> float:
    """``int_L^inf cos(omega a) / a^2 da``."""
    omega = abs(omega)
    if omega == 0:
        return 1.0 / L
    si, _ = sici(omega * L)
    return math.cos(omega * L) / L - omega * (math.pi / 2 - si)


def fejer_kernel_check(t: float, step: float = 1e-3, cutoff: float = 1e3, tail: bool = True) -> float:
    """Quadrature of ``int e(t a) (sin(pi a) / (pi a))^2 da``, which should equal ``max(1 - |t|, 0)``.

    Composite Simpson on ``[-cutoff, cutoff]``; with ``tail`` the remainder
    beyond the cutoff is added in closed form via the sine integral.
    """
    if step > 1e-3 or cutoff < 1e3:
        raise BudgetExceeded(f"quadrature needs step <= 1e-3 and cutoff >= 1e3 (got step={step}, cutoff={cutoff})")
    n = int(math.ceil(cutoff / step))
    n += n % 2
    h = cutoff / n
    total = 0.0
    chunk = 1 << 20
    for lo in range(0, n + 1, chunk):
        j = np.arange(lo, min(lo + chunk, n + 1))
        a = j * h
        f = np.cos(2 * math.pi * t * a) * np.sinc(a) ** 2
        w = np.where((j == 0) | (j == n), 1.0, np.where(j % 2 == 1, 4.0, 2.0))
        total += float(np.dot(w, f))
    half_integral = total * h / 3
    if tail:
        # sin^2(pi a) cos(2 pi t a) = [cos(2pi t a) - cos(2pi(t+1)a)/2 - cos(2pi(t-1)a)/2] / 2
        w0 = 2 * math.pi * t
        rem = _cos_tail(w0, cutoff) - 0.5 * _cos_tail(w0 + 2 * math.pi, cutoff) - 0.5 * _cos_tail(w0 - 2 * math.pi, cutoff)
        half_integral += rem / (2 * math.pi**2)
    return 2 * half_integral


@dataclass(frozen=True)
class CorrelationCurve:
    """Complex correlation values on the grid ``alpha = j * step``, ``|j| <= half``."""

    half: int
    step: float
    values: np.ndarray

    @property
    def bound(self) -> float:
        return self.half * self.step

    @property
    def alphas(self) -> np.ndarray:
        return np.arange(-self.half, self.half + 1) * self.step

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)


@dataclass(frozen=True)
class FejerScan:
    curve: CorrelationCurve
    X: GridSet
    measured_measure: float
    delta: float
    threshold: float
    rho: float
    A: float
    warnings: tuple[str, ...] = ()

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["alpha", "re", "im", "magnitude", "in_X"])
        for a, v, m, inx in zip(self.curve.alphas, self.curve.values, self.curve.magnitude, self.X.members):
            w.writerow([repr(float(a)), repr(float(v.real)), repr(float(v.imag)), repr(float(m)), int(inx)])
        return buf.getvalue()


def log_ratio_weights(
    f1: MultiplicativeFunction, f2: MultiplicativeFunction, pair: AffinePair, A: float, x: int, table: PrimeTable
) -> tuple[np.ndarray, np.ndarray]:
    """Distinct values ``u`` of ``A(log|f1(an+b)| - log|f2(cn+d)|)`` and their summed ``1/n`` weights.

    Only ``n`` with both values non-zero contribute.
    """
    pv = pair_values(f1, f2, pair, x, table)
    both = (pv.left != 0) & (pv.right != 0)
    diff = A * (np.log(np.abs(pv.left[both])) - np.log(np.abs(pv.right[both])))
    uniq, inv = np.unique(diff, return_inverse=True)
    weights = np.bincount(inv, weights=1.0 / pv.n[both], minlength=uniq.size)
    return uniq, weights


def correlation_curve(uniq: np.ndarray, weights: np.ndarray, alphas: np.ndarray, x: int) -> np.ndarray:
    """``(1/H_x) sum_u w_u e^{i alpha u}`` at each ``alpha``."""
    if alphas.size * max(uniq.size, 1) > SCAN_BUDGET:
        raise BudgetExceeded(
            f"scan of {alphas.size} grid points against {uniq.size} distinct log-ratios exceeds the budget {SCAN_BUDGET}"
        )
    out = np.empty(alphas.size, dtype=np.complex128)
    rows = max(1, (1 << 22) // max(uniq.size, 1))
    for s in range(0, alphas.size, rows):
        a = alphas[s : s + rows]
        out[s : s + rows] = np.exp(1j * np.outer(a, uniq)) @ weights
    return out / harmonic(x)


def fejer_scan(
    f1: MultiplicativeFunction,
    f2: MultiplicativeFunction,
    pair: AffinePair,
    C,
    A: float,
    B: float,
    alpha_step: float,
    x: int,
    table: PrimeTable,
    threshold: float | None = None,
    delta: float | None = None,
    tolerance: float | None = None,
) -> FejerScan:
    """Scan ``alpha -> (1/H_x)|sum |F1|_alpha(an+b) |F2|_{-alpha}(cn+d) / n|`` over ``[-B, B]``.

    ``F_j = f_j^A``. ``delta`` is measured with :func:`log_density_equal`
    unless given; ``X`` collects the grid points whose magnitude reaches
    ``threshold`` (default ``delta / (16 pi)``).
    """
    C = _as_complex(C)
    if A < 1:
        raise InvalidArgument("A must be >= 1")
    notes = []
    if delta is None:
        delta = log_density_equal(f1, f2, pair, C, x, table, tolerance).normalized
    if delta <= 0:
        raise InvalidArgument("measured coincidence density is 0; the scan hypothesis is empty")
    if B < delta**-2:
        msg = f"B={B} is below delta^-2={delta ** -2:.3f}"
        warnings.warn(msg, stacklevel=2)
        notes.append(msg)
    half = int(round(B / alpha_step))
    if 2 * half + 1 > MAX_SCAN_GRID:
        raise BudgetExceeded(f"scan grid of {2 * half + 1} points exceeds the budget {MAX_SCAN_GRID}")
    if threshold is None:
        threshold = delta / (16 * math.pi)
    uniq, weights = log_ratio_weights(f1, f2, pair, A, x, table)
    alphas = np.arange(-half, half + 1) * alpha_step
    values = correlation_curve(uniq, weights, alphas, x)
    curve = CorrelationCurve(half, float(alpha_step), values)
    X = GridSet(half, float(alpha_step), curve.magnitude >= threshold)
    rho = A * math.log(abs(C))
    return FejerScan(curve, X, X.measure, float(delta), float(threshold), rho, float(A), tuple(notes))


def dh_integral(scan: FejerScan) -> complex:
    """Trapezoid rule for ``int_{-B}^{B} curve(a) e^{-i rho a} (sin(a/2)/(a/2))^2 da``."""
    a = scan.curve.alphas
    kernel = np.sinc(a / (2 * math.pi)) ** 2
    integrand = scan.curve.values * np.exp(-1j * scan.rho * a) * kernel
    return complex(np.trapezoid(integrand, a))


@dataclass(frozen=True)
class DHChain:
    """Both sides of the truncated Davenport-Heilbronn bound for one scan.

    ``rhs_stated`` uses the prefactor ``4 pi``; ``rhs_exact`` uses ``1/pi``,
    which is what the substitution ``alpha -> 2 pi alpha`` in the Fejer pair
    actually produces. Both include the ``1/B`` tail.
    """

    delta: float
    integral: complex
    tail: float
    rhs_stated: float
    rhs_exact: float

    def holds(self, slack: float = 0.05) -> bool:
        return self.delta <= self.rhs_stated + slack and self.delta <= self.rhs_exact + slack


def dh_chain(scan: FejerScan) -> DHChain:
    integral = dh_integral(scan)
    tail = 1.0 / scan.curve.bound
    return DHChain(
        scan.delta,
        integral,
        tail,
        4 * math.pi * integral.real + tail,
        integral.real / math.pi + tail,
    )


def indicator_bound_violations(
    f1: MultiplicativeFunction,
    f2: MultiplicativeFunction,
    pair: AffinePair,
    C,
    A: float,
    x: int,
    table: PrimeTable,
    samples: int = 10**4,
    seed: int = 0,
    tolerance: float | None = None,
) -> int:
    """Count sampled ``n`` violating ``1_{f1 = C f2 != 0} <= 2 max(1 - |g1 - g2 - rho|, 0)``."""
    C = _as_complex(C)
    if tolerance is None:
        tolerance = default_tolerance(f1, f2, C)
    pv = pair_values(f1, f2, pair, x, table)
    rng = np.random.default_rng(seed)
    pick = rng.integers(0, pv.n.size, size=min(samples, pv.n.size))
    left, right = pv.left[pick], pv.right[pick]
    ind = coincidence_mask(left, right, C, tolerance)
    rho = A * math.log(abs(C))
    with np.errstate(divide="ignore", invalid="ignore"):
        g = A * (np.log(np.abs(left)) - np.log(np.abs(right))) - rho
    bound = np.where(ind, 2 * np.maximum(1 - np.abs(np.nan_to_num(g, nan=np.inf)), 0), 0.0)
    return int(np.sum(ind & (bound < 1.0)))


def vanishing_counterexample_density(
    f: MultiplicativeFunction, pair: AffinePair, p1: int, p2: int, x: int, table: PrimeTable
) -> float:
    """Density of ``{n <= x : p1^2 | an+b, p2^2 | cn+d}``, on which ``mu^2 f`` vanishes at both arguments."""
    for p in (p1, p2):
        if not table.is_prime(p):
            raise InvalidArgument(f"{p} is not a prime")
    if p1 == p2:
        raise InvalidArgument("p1 and p2 must be distinct")
    bad = pair.a * pair.c * pair.determinant
    if bad % p1 == 0 or bad % p2 == 0:
        raise InvalidArgument("p1, p2 must not divide ac(ad - bc)")
    twisted = squarefree_twist(f)
    pv = pair_values(twisted, twisted, pair, x, table)
    u = pair.a * pv.n + pair.b
    v = pair.c * pv.n + pair.d
    hit = (u % (p1 * p1) == 0) & (v % (p2 * p2) == 0)
    if np.any(pv.left[hit] != 0) or np.any(pv.right[hit] != 0):
        raise AssertionError("squarefree twist does not vanish on the constructed set")
    return int(hit.sum()) / x


@dataclass(frozen=True)
class NonvanishingReport:
    log_density: float
    euler_bound: float
    ratio: float


def nonvanishing_log_density(f: MultiplicativeFunction, x: int, table: PrimeTable) -> NonvanishingReport:
    """``(1/H_x) sum_{n <= x, f(n) != 0} 1/n`` against ``exp(sum_{p <= x} (1_{f(p) != 0} - 1)/p)``."""
    vals = mf_values(f, x, table)
    n = np.flatnonzero(vals[1:] != 0) + 1
    logd = float(np.sum(1.0 / n)) / harmonic(x)
    ps = table.primes_upto(x)
    zero = f.at_primes(ps) == 0
    bound = math.exp(-float(np.sum(1.0 / ps[zero])))
    return NonvanishingReport(logd, bound, logd / bound)
