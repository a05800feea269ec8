"""End-to-end run of the archimedean argument at a single scale ``x``.

scan -> pretender per alpha in X -> extend ``t`` to ``[-B, B]`` by sum
decomposition -> linear fit ``t_beta ~ r beta`` -> exception sum over primes.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import quad

from multcoinc.correlate import AffinePair, fejer_scan, log_density_equal
from multcoinc.errors import BudgetExceeded, InvalidArgument
from multcoinc.multfunc import MultiplicativeFunction
from multcoinc.pretense import PretenseResult, best_pretender_values, distance_squared_from_values
from multcoinc.primes import PrimeTable
from multcoinc.sumset import Decomposer, GridFunction, approx_cauchy_fit, cover_check

ONE_MINUS_SINC2 = 1.0 - math.sin(2.0) / 2.0


@dataclass(frozen=True)
class PipelineConfig:
    A: float = 1.0
    B: float = 40.0
    alpha_step: float = 0.01
    x: int = 10**6
    conductor_bound: int = 10
    t_max: float = 10.0
    t_step: float = 0.01
    delta_override: float | None = None
    threshold: float | None = None
    m_cap: int = 720
    # pretender distance^2 above which t_alpha is flagged as untrusted
    quality_threshold: float = 1.0
    # number of distinct oracle searches allowed per run
    max_searches: int = 64
    threads: int = 1

    def __post_init__(self):
        if self.A < 1:
            raise InvalidArgument("A must be >= 1")
        if self.B < 1:
            raise InvalidArgument("B must be >= 1")
        if self.alpha_step <= 0:
            raise InvalidArgument("alpha_step must be positive")
        if self.m_cap < 1:
            raise InvalidArgument("m_cap must be >= 1")
        if self.delta_override is not None and not (0 < self.delta_override <= 1):
            raise InvalidArgument("delta_override must lie in (0, 1]")


@dataclass(frozen=True)
class ExceptionSum:
    """Reciprocal sums over primes outside the window, and over primes where ``f1`` vanishes."""

    value: float
    count: int
    zero_prime_sum: float
    zero_count: int


@dataclass
class PipelineResult:
    measured_delta: float
    X_measure: float
    m: int
    t_map: GridFunction
    r: float
    fit_K: float
    exception_sum: float
    k: int
    max_conductor: int
    sup_error: float
    grid_slack: float
    zero_prime_sum: float
    sinc_bound: float
    oracle_searches: int
    untrusted_alphas: int
    worst_pretender_distance: float
    worst_power_distance: float
    t_bound: float
    warnings: list[str] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    def to_dict(self, timings: bool = False) -> dict:
        out = {k: v for k, v in asdict(self).items() if k not in ("t_map", "timings")}
        out["t_map"] = {
            "half": self.t_map.half,
            "step": self.t_map.step,
            "values": [float(v) for v in self.t_map.values],
        }
        if timings:
            out["timings"] = dict(self.timings)
        return out


def _prime_logs(f1: MultiplicativeFunction, A: float, x: int, table: PrimeTable):
    if x > table.limit:
        raise InvalidArgument(f"x={x} exceeds table limit {table.limit}")
    ps = table.primes_upto(x)
    vals = np.abs(f1.at_primes(ps))
    zero = vals == 0
    with np.errstate(divide="ignore"):
        u = A * np.log(np.where(zero, 1.0, vals))
    return ps, u, zero


def sparse_exception_sum(
    f1: MultiplicativeFunction, A: float, r: float, B: float, x: int, table: PrimeTable
) -> ExceptionSum:
    """Primes ``p <= x`` with ``f1(p) != 0`` and ``|f1(p)|^A / p^r`` outside ``[e^{-2/B}, e^{2/B}]``.

    Compared in log form: ``|A log|f1(p)| - r log p| > 2/B``.
    """
    ps, u, zero = _prime_logs(f1, A, x, table)
    dev = np.abs(u - r * np.log(ps.astype(np.float64)))
    out = (~zero) & (dev > 2.0 / B)
    return ExceptionSum(
        float(np.sum(1.0 / ps[out])),
        int(out.sum()),
        float(np.sum(1.0 / ps[zero])),
        int(zero.sum()),
    )


def sinc_average_bound(
    f: MultiplicativeFunction, m: int, B: float, r: float, x: int, table: PrimeTable, A: float = 1.0
) -> float:
    """``sum_{p <= x, f(p) != 0} (1 - sinc(m B log(|f(p)|^A / p^r))) / p``."""
    if m < 1:
        raise InvalidArgument("m must be >= 1")
    ps, u, zero = _prime_logs(f, A, x, table)
    arg = m * B * (u - r * np.log(ps.astype(np.float64)))
    terms = (1.0 - np.sinc(arg[~zero] / math.pi)) / ps[~zero]
    total = float(np.sum(terms))
    assert total >= -1e-12
    return max(total, 0.0)


def averaging_identity(R: float, y: float) -> tuple[float, float]:
    """``(1/2R) int_{-R}^{R} y^{it} dt`` by quadrature, and ``sinc(R log y)``."""
    if R <= 0 or y <= 0:
        raise InvalidArgument("need R > 0 and y > 0")
    ly = math.log(y)
    # the odd imaginary part integrates to zero
    val, _ = quad(lambda t: math.cos(t * ly), 0.0, R, limit=max(50, int(abs(R * ly)) + 50), epsabs=1e-12, epsrel=1e-12)
    return val / R, float(np.sinc(R * ly / math.pi))


def sigma_A(f1: MultiplicativeFunction, A: float, B: float, x: int, table: PrimeTable) -> float:
    """Reciprocal sum over ``p <= x`` with ``|f1(p)| != 0`` outside ``[e^{-2/(AB)}, e^{2/(AB)} x^{x^2/A}]``."""
    ps, u, zero = _prime_logs(f1, 1.0, x, table)
    lo = -2.0 / (A * B)
    hi = 2.0 / (A * B) + (float(x) ** 2 / A) * math.log(x)
    out = (~zero) & ((u < lo) | (u > hi))
    return float(np.sum(1.0 / ps[out]))


def _patched_prime_logs(f1: MultiplicativeFunction, A: float, ps: np.ndarray) -> np.ndarray:
    """``log|f(p)|`` for ``f = f1^A`` patched to 1 where ``f1`` vanishes."""
    vals = np.abs(f1.at_primes(ps))
    with np.errstate(divide="ignore"):
        return A * np.log(np.where(vals == 0, 1.0, vals))


def run_pipeline(
    f1: MultiplicativeFunction,
    f2: MultiplicativeFunction,
    pair: AffinePair,
    C,
    config: PipelineConfig,
    table: PrimeTable,
    log=None,
) -> PipelineResult:
    """Run every stage at scale ``config.x``; ``log`` receives one line per stage if given."""
    say = log or (lambda _msg: None)
    timings: dict[str, float] = {}
    notes: list[str] = []
    clock = time.perf_counter()

    def lap(name: str) -> None:
        nonlocal clock
        now = time.perf_counter()
        timings[name] = now - clock
        clock = now

    x, A, B = config.x, config.A, config.B
    if config.delta_override is not None:
        delta = float(config.delta_override)
    else:
        delta = log_density_equal(f1, f2, pair, C, x, table).normalized
    if delta <= 0:
        raise InvalidArgument("coincidence density is 0; nothing to run")
    say(f"delta={delta:.6f}")
    lap("density")

    scan = fejer_scan(f1, f2, pair, C, A, B, config.alpha_step, x, table, threshold=config.threshold, delta=delta)
    notes.extend(scan.warnings)
    X = scan.X
    if X.count == 0:
        raise InvalidArgument("scan produced an empty X")
    say(f"lambda(X)={X.measure:.4f} threshold={scan.threshold:.6f}")
    lap("scan")

    # |f|_alpha(p) = exp(i alpha u_p): one search per distinct alpha * u
    ps = table.primes_upto(x)
    u = _patched_prime_logs(f1, A, ps)
    constant = not np.any(u)
    offsets = X.offsets
    keys = np.zeros_like(offsets) if constant else offsets
    distinct = np.unique(keys)
    if distinct.size > config.max_searches:
        raise BudgetExceeded(
            f"{distinct.size} distinct pretender searches exceed max_searches={config.max_searches}"
        )
    found: dict[int, PretenseResult] = {}
    for key in distinct:
        alpha = int(key) * X.step
        found[int(key)] = best_pretender_values(
            np.exp(1j * alpha * u), ps, config.conductor_bound, config.t_max, config.t_step, config.threads
        )
    per_alpha = [found[int(k)] for k in keys]
    say(f"oracle searches={distinct.size}")
    lap("oracle")

    nu = max(res.character_modulus for res in per_alpha)
    m = min(math.factorial(nu), config.m_cap)
    if math.factorial(nu) > config.m_cap:
        notes.append(f"m = {nu}! capped at {config.m_cap}")
    worst = max(res.distance_squared for res in per_alpha)
    untrusted = sum(res.distance_squared > config.quality_threshold for res in per_alpha)
    worst_power = 0.0
    for key in distinct:
        res = found[int(key)]
        alpha = int(key) * X.step
        fv = np.exp(1j * m * alpha * u)
        gv = np.exp(1j * m * res.t * np.log(ps.astype(np.float64)))
        worst_power = max(worst_power, distance_squared_from_values(fv, gv, ps))
    t_alpha = np.array([res.t for res in per_alpha])
    lap("powers")

    k = math.ceil(100 * B / X.measure)
    if not cover_check(X, k):
        raise InvalidArgument(f"k={k} copies of X do not cover [-B, B]")
    dec = Decomposer(X, k)
    picks = dec.decompose_many(np.arange(-X.half, X.half + 1))
    # t at each offset, looked up through the offset's position in X
    t_at = np.zeros(2 * X.half + 1)
    t_at[offsets + X.half] = t_alpha
    t_beta = t_at[picks + X.half].sum(axis=1)
    t_map = GridFunction(X.half, X.step, t_beta)
    say(f"k={k} max|t_beta|={float(np.max(np.abs(t_beta))):.4f}")
    lap("extend")

    fit = approx_cauchy_fit(t_map)
    r = fit.c
    lap("fit")

    exc = sparse_exception_sum(f1, A, r, B, x, table)
    sinc = sinc_average_bound(f1, 1, B, r, x, table, A=A)
    say(f"r={r:.6g} exception_sum={exc.value:.6f}")
    lap("exceptions")

    return PipelineResult(
        measured_delta=delta,
        X_measure=X.measure,
        m=m,
        t_map=t_map,
        r=r,
        fit_K=fit.witnessed_K,
        exception_sum=exc.value,
        k=k,
        max_conductor=nu,
        sup_error=fit.sup_error,
        grid_slack=fit.grid_slack,
        zero_prime_sum=exc.zero_prime_sum,
        sinc_bound=sinc,
        oracle_searches=int(distinct.size),
        untrusted_alphas=int(untrusted),
        worst_pretender_distance=worst,
        worst_power_distance=worst_power,
        t_bound=k * A * config.t_max,
        warnings=notes,
        timings=timings,
    )

