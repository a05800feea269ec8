"""Multiplicative functions given by their values at prime powers.

A :class:`MultiplicativeFunction` wraps a vectorised ``rule(p, k)`` returning
``f(p**k)`` for arrays of primes ``p`` and exponents ``k >= 1``. Whole-range
evaluation goes through :func:`mf_values`, which walks the
:class:`~multcoinc.primes.Decomposition` level by level (number of distinct
prime factors), so evaluating over ``n <= 10**7`` costs a handful of gathers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from multcoinc import characters
from multcoinc.errors import InvalidArgument
from multcoinc.primes import PrimeTable, factorize

Rule = Callable[[np.ndarray, np.ndarray], np.ndarray]

COMPLEX = "complex"
REAL = "real"
UNIMODULAR = "unimodular-or-zero"
VALUE_CLASSES = (COMPLEX, REAL, UNIMODULAR)


@dataclass(frozen=True)
class MultiplicativeFunction:
    name: str
    rule: Rule = field(repr=False, compare=False)
    completely_multiplicative: bool = False
    value_class: str = COMPLEX
    is_real: bool = False
    integer_valued: bool = False

    def __post_init__(self):
        if self.value_class not in VALUE_CLASSES:
            raise InvalidArgument(f"unknown value class {self.value_class!r}")

    @property
    def dtype(self):
        return np.float64 if self.is_real else np.complex128

    def at(self, p, k) -> np.ndarray:
        """``f(p**k)`` for broadcastable arrays ``p`` (primes) and ``k >= 1``."""
        p = np.asarray(p, dtype=np.int64)
        k = np.asarray(k, dtype=np.int64)
        p, k = np.broadcast_arrays(p, k)
        out = np.asarray(self.rule(p, k))
        if self.is_real:
            if np.iscomplexobj(out):
                out = out.real
            return out.astype(np.float64, copy=False)
        return out.astype(np.complex128, copy=False)

    def at_primes(self, primes: np.ndarray) -> np.ndarray:
        return self.at(primes, 1)

    def __call__(self, n: int, table: PrimeTable):
        return mf_eval(self, n, table)


def mf_eval(f: MultiplicativeFunction, n: int, table: PrimeTable) -> complex | float:
    """``f(n)`` via the factorisation of ``n``; ``f(1) = 1``."""
    fac = factorize(n, table)  # validates range
    if not fac:
        return 1.0 if f.is_real else 1.0 + 0j
    ps, ks = zip(*fac)
    vals = f.at(np.array(ps), np.array(ks))
    v = vals.prod()
    return float(v) if f.is_real else complex(v)


def mf_values(f: MultiplicativeFunction, N: int, table: PrimeTable) -> np.ndarray:
    """Array ``v`` with ``v[n] = f(n)`` for ``1 <= n <= N`` (``v[0] = 0``)."""
    if N > table.factor_limit:
        raise InvalidArgument(f"N={N} exceeds the factorisation limit {table.factor_limit}")
    dec = table.decomposition
    vals = np.zeros(N + 1, dtype=f.dtype)
    if N >= 1:
        vals[1] = 1
    pp = dec.prime_powers[: np.searchsorted(dec.prime_powers, N, side="right")]
    vals[pp] = f.at(table.spf[pp], dec.exp[pp])
    for level in dec.levels:
        idx = level[: np.searchsorted(level, N, side="right")]
        if idx.size == 0:
            break
        vals[idx] = vals[dec.head[idx]] * vals[dec.rest[idx]]
    return vals


def _float(k):
    return np.asarray(k, dtype=np.float64)


# -- built-ins -------------------------------------------------------------


def one() -> MultiplicativeFunction:
    return MultiplicativeFunction("one", lambda p, k: np.ones(p.shape), True, UNIMODULAR, True, True)


def moebius() -> MultiplicativeFunction:
    return MultiplicativeFunction("moebius", lambda p, k: np.where(k == 1, -1.0, 0.0), False, UNIMODULAR, True, True)


def liouville() -> MultiplicativeFunction:
    return MultiplicativeFunction(
        "liouville", lambda p, k: np.where(k % 2 == 1, -1.0, 1.0), True, UNIMODULAR, True, True
    )


def divisor() -> MultiplicativeFunction:
    return MultiplicativeFunction("divisor", lambda p, k: _float(k + 1), False, REAL, True, True)


def euler_phi() -> MultiplicativeFunction:
    return MultiplicativeFunction(
        "euler_phi", lambda p, k: _float(p ** (k - 1) * (p - 1)), False, REAL, True, True
    )


def sigma() -> MultiplicativeFunction:
    return MultiplicativeFunction(
        "sigma", lambda p, k: _float((p ** (k + 1) - 1) // (p - 1)), False, REAL, True, True
    )


def identity() -> MultiplicativeFunction:
    return MultiplicativeFunction("identity", lambda p, k: _float(p**k), True, REAL, True, True)


def nit(t: float) -> MultiplicativeFunction:
    """``n -> n^{it}``."""
    t = float(t)
    return MultiplicativeFunction(
        f"nit(t={t!r})", lambda p, k: np.exp(1j * t * k * np.log(p)), True, UNIMODULAR, t == 0.0, t == 0.0
    )


def character(q: int, index: int) -> MultiplicativeFunction:
    """Dirichlet character ``chi_q(index, .)`` in Conrey labelling."""
    q, index = int(q), int(index)
    table = characters.character_table(q, index)
    real = bool(np.all(table.imag == 0))

    def rule(p, k):
        return table[p % q] ** k

    return MultiplicativeFunction(f"character(q={q},index={index})", rule, True, UNIMODULAR, real, real)


def squarefree_twist(inner: MultiplicativeFunction) -> MultiplicativeFunction:
    """``mu^2 * inner``: agrees with ``inner`` on squarefree ``n``, vanishes elsewhere."""

    def rule(p, k):
        v = inner.at(p, np.ones_like(k))
        return np.where(k == 1, v, 0)

    return MultiplicativeFunction(
        f"squarefree_twist({inner.name})", rule, False, inner.value_class, inner.is_real, inner.integer_valued
    )


def sign_flip(*primes: int) -> MultiplicativeFunction:
    """Completely multiplicative with ``f(p) = -1`` for the listed primes, ``+1`` otherwise."""
    bad = np.array(sorted({int(p) for p in primes}), dtype=np.int64)

    def rule(p, k):
        flip = np.isin(p, bad)
        return np.where(flip & (k % 2 == 1), -1.0, 1.0)

    label = ",".join(str(int(p)) for p in bad)
    return MultiplicativeFunction(f"sign_flip({label})", rule, True, UNIMODULAR, True, True)


def hecke_delta(N: int = 10**4) -> MultiplicativeFunction:
    """Normalised coefficients ``tau(n)/n^{11/2}`` of the discriminant form, for ``p**k <= N``."""
    from multcoinc.cuspform import delta_coefficients

    coeffs = delta_coefficients(int(N))
    lam = coeffs.lam

    def rule(p, k):
        pk = p**k
        if pk.size and int(pk.max()) > coeffs.N:
            raise InvalidArgument(f"hecke_delta computed only up to N={coeffs.N}")
        return lam[pk]

    return MultiplicativeFunction(f"hecke_delta(N={coeffs.N})", rule, False, REAL, True, False)


# -- combinators -----------------------------------------------------------


def mf_archimedean(f: MultiplicativeFunction, t: float) -> MultiplicativeFunction:
    """``|f|_t``: ``n -> |f(n)|^{it}`` on the support of ``f``, zero elsewhere."""
    t = float(t)

    def rule(p, k):
        v = np.abs(f.at(p, k))
        out = np.zeros(v.shape, dtype=np.complex128)
        nz = v != 0
        out[nz] = np.exp(1j * t * np.log(v[nz]))
        return out

    real = t == 0.0
    return MultiplicativeFunction(
        f"proj(t={t!r},inner={f.name})", rule, f.completely_multiplicative, UNIMODULAR, real, real
    )


def product(f: MultiplicativeFunction, g: MultiplicativeFunction) -> MultiplicativeFunction:
    if f.value_class == g.value_class:
        cls = f.value_class
    else:
        cls = REAL if f.is_real and g.is_real else COMPLEX
    return MultiplicativeFunction(
        f"product({f.name},{g.name})",
        lambda p, k: f.at(p, k) * g.at(p, k),
        f.completely_multiplicative and g.completely_multiplicative,
        cls,
        f.is_real and g.is_real,
        f.integer_valued and g.integer_valued,
    )


def conjugate(f: MultiplicativeFunction) -> MultiplicativeFunction:
    if f.is_real:
        return f
    return MultiplicativeFunction(
        f"conj({f.name})", lambda p, k: np.conj(f.at(p, k)), f.completely_multiplicative, f.value_class, False, False
    )


def power(f: MultiplicativeFunction, m: int) -> MultiplicativeFunction:
    """Pointwise ``f^m`` (``f^m(p^k) = f(p^k)^m``)."""
    m = int(m)
    if m < 1:
        raise InvalidArgument(f"power exponent must be >= 1, got {m}")
    if m == 1:
        return f
    return MultiplicativeFunction(
        f"power(m={m},inner={f.name})",
        lambda p, k: f.at(p, k) ** m,
        f.completely_multiplicative,
        f.value_class,
        f.is_real,
        f.integer_valued,
    )


def mf_combine(f: MultiplicativeFunction, g: MultiplicativeFunction | None, op: str, m: int | None = None):
    if op == "product":
        if g is None:
            raise InvalidArgument("product needs two functions")
        return product(f, g)
    if op == "conjugate":
        return conjugate(f)
    if op == "power":
        if m is None:
            raise InvalidArgument("power needs an exponent m")
        return power(f, m)
    raise InvalidArgument(f"unknown combinator {op!r}")


def support_indicator(f: MultiplicativeFunction) -> MultiplicativeFunction:
    """``1_{f(n) != 0}``, i.e. ``|f|_0``."""
    return mf_archimedean(f, 0.0)


# -- registry and string parsing--------------------------------------------

REGISTRY: dict[str, Callable[..., MultiplicativeFunction]] = {
    "one": one,
    "moebius": moebius,
    "liouville": liouville,
    "divisor": divisor,
    "euler_phi": euler_phi,
    "sigma": sigma,
    "identity": identity,
    "nit": nit,
    "character": character,
    "squarefree_twist": squarefree_twist,
    "hecke_delta": hecke_delta,
    "sign_flip": sign_flip,
    "proj": lambda t, inner: mf_archimedean(inner, t),
    "product": product,
    "conj": conjugate,
    "power": lambda m, inner: power(inner, m),
}

BUILTIN_NAMES = (
    "moebius",
    "liouville",
    "divisor",
    "euler_phi",
    "sigma",
    "identity",
    "nit",
    "character",
    "squarefree_twist",
    "hecke_delta",
)


def mf_builtin(name: str, *args, **params) -> MultiplicativeFunction:
    try:
        factory = REGISTRY[name]
    except KeyError:
        raise InvalidArgument(f"unknown multiplicative function {name!r}") from None
    try:
        return factory(*args, **params)
    except TypeError as exc:
        raise InvalidArgument(f"bad parameters for {name}: {exc}") from None


_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z_0-9]*)|([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)|(.))")


def _tokens(text: str) -> list[tuple[str, str]]:
    out = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        pos = m.end()
        if m.group(1):
            out.append(("name", m.group(1)))
        elif m.group(2):
            out.append(("num", m.group(2)))
        elif m.group(3) and not m.group(3).isspace():
            out.append(("sym", m.group(3)))
    return out


def parse_function(text: str) -> MultiplicativeFunction:
    """Build a function from a string such as ``proj(t=0.5,inner=sigma)``.

    Grammar: ``expr := NAME ['(' [arg (',' arg)*] ')']`` with
    ``arg := [NAME '='] (NUMBER | expr)``.
    """
    toks = _tokens(text)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else ("eof", "")

    def take(kind, value=None):
        nonlocal pos
        tok = peek()
        if tok[0] != kind or (value is not None and tok[1] != value):
            raise InvalidArgument(f"cannot parse function string {text!r} near token {tok[1]!r}")
        pos += 1
        return tok[1]

    def value() -> Any:
        kind, tok = peek()
        if kind == "num":
            take("num")
            return float(tok) if any(c in tok for c in ".eE") else int(tok)
        return expr()

    def expr() -> MultiplicativeFunction:
        name = take("name")
        args, kwargs = [], {}
        if peek() == ("sym", "("):
            take("sym", "(")
            while peek() != ("sym", ")"):
                if peek()[0] == "name" and pos + 1 < len(toks) and toks[pos + 1] == ("sym", "="):
                    key = take("name")
                    take("sym", "=")
                    kwargs[key] = value()
                else:
                    args.append(value())
                if peek() == ("sym", ","):
                    take("sym", ",")
                elif peek() != ("sym", ")"):
                    raise InvalidArgument(f"cannot parse function string {text!r}")
            take("sym", ")")
        return mf_builtin(name, *args, **kwargs)

    result = expr()
    if pos != len(toks):
        raise InvalidArgument(f"trailing input in function string {text!r}")
    return result


def check_unit_bounded(f: MultiplicativeFunction, primes: np.ndarray, what: str = "function") -> np.ndarray:
    """Values of ``f`` at ``primes``, raising unless they lie in the closed unit disc."""
    vals = f.at_primes(primes)
    if vals.size and float(np.max(np.abs(vals))) > 1.0 + 1e-9:
        raise InvalidArgument(f"{what} {f.name} is not 1-bounded at primes")
    return vals


def sample_value_class(f: MultiplicativeFunction, table: PrimeTable, samples: int = 1000, seed: int = 0) -> bool:
    """Spot-check the declared value class on random ``n <= table.factor_limit``."""
    rng = np.random.default_rng(seed)
    ns = rng.integers(1, table.factor_limit + 1, size=samples)
    vals = np.array([mf_eval(f, int(n), table) for n in ns])
    if f.value_class == UNIMODULAR:
        mod = np.abs(vals)
        return bool(np.all((mod < 1e-12) | (np.abs(mod - 1) < 1e-12)))
    if f.value_class == REAL:
        return bool(np.all(np.abs(np.imag(vals)) < 1e-12))
    return True
