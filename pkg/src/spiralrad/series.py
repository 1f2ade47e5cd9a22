"""Entire power series given by coefficient rules.

Coefficients are carried as ``(sign, log|a_n|)`` pairs so that series whose
terms involve Gamma values far outside double range (``Gamma(mu*n + nu)`` for
n in the hundreds) can still be summed.  A series is either in ``z`` or in
``z**2``; derivatives are always taken with respect to ``z``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import gammaln, gammasgn, logsumexp

Z = "z"
Z_SQUARED = "z2"

DEFAULT_EPS = 1e-14
TERM_CAP = 10_000
# number of successive term ratios inspected when bounding a tail geometrically
RATIO_WINDOW = 16
TRUNCATION_MEMO = 4096

CoeffRule = Callable[[np.ndarray], "tuple[np.ndarray, np.ndarray]"]


class TruncationCapExceeded(RuntimeError):
    """The series needs more than ``TERM_CAP`` terms at the requested point."""


# ---------------------------------------------------------------------------
# coefficient rules


@dataclass(frozen=True)
class GammaRatioRule:
    """``a_n = sign * exp(log_const) * x**n * prod Gamma(p*n+q) / prod Gamma(p*n+q)``.

    ``numer`` and ``denom`` hold ``(p, q)`` pairs for the Gamma arguments.
    All Gamma arguments must avoid the poles for every ``n >= 0``.
    """

    numer: tuple[tuple[float, float], ...]
    denom: tuple[tuple[float, float], ...]
    x: float = 1.0
    log_const: float = 0.0
    const_sign: float = 1.0

    def __post_init__(self) -> None:
        if self.x == 0.0:
            raise ValueError("argument scale x must be nonzero")

    def __call__(self, n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        n = np.asarray(n, dtype=float)
        logmag = np.full(n.shape, self.log_const) + n * math.log(abs(self.x))
        sign = np.full(n.shape, self.const_sign)
        if self.x < 0:
            sign = sign * np.where(n % 2 == 0, 1.0, -1.0)
        for p, q in self.numer:
            arg = p * n + q
            logmag = logmag + gammaln(arg)
            sign = sign * gammasgn(arg)
        for p, q in self.denom:
            arg = p * n + q
            pole = (arg <= 0) & (arg == np.floor(arg))
            # 1/Gamma vanishes at the poles
            logmag = np.where(pole, -np.inf, logmag - gammaln(np.where(pole, 1.0, arg)))
            sign = np.where(pole, 0.0, sign * gammasgn(np.where(pole, 1.0, arg)))
        return sign, logmag


@dataclass(frozen=True)
class QSeriesRule:
    """``a_n = (c; p)_n p**(beta n**2) / (p; p)_n * x**n`` for ``0 < p < 1``."""

    beta: float
    p: float
    c: float
    x: float = 1.0

    def __call__(self, n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        n = np.asarray(n, dtype=int)
        top = int(n.max()) + 1 if n.size else 1
        j = np.arange(top, dtype=float)
        num = 1.0 - self.c * self.p**j            # factors of (c; p)_k
        den = -np.expm1((j + 1.0) * math.log(self.p))  # factors of (p; p)_k
        with np.errstate(divide="ignore"):
            log_num = np.concatenate(([0.0], np.cumsum(np.log(np.abs(num)))))
        sign_num = np.concatenate(([1.0], np.cumprod(np.sign(num))))
        log_den = np.concatenate(([0.0], np.cumsum(np.log(den))))
        nf = n.astype(float)
        logmag = log_num[n] - log_den[n] + self.beta * nf * nf * math.log(self.p) + nf * math.log(abs(self.x))
        sign = sign_num[n]
        if self.x < 0:
            sign = sign * np.where(n % 2 == 0, 1.0, -1.0)
        return sign, logmag


@dataclass(frozen=True)
class PolynomialRule:
    """Explicit finite coefficient list; entries beyond the list are zero."""

    coeffs: tuple[float, ...]

    def __call__(self, n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        n = np.asarray(n, dtype=int)
        c = np.asarray(self.coeffs, dtype=float)
        vals = np.where(n < len(c), c[np.minimum(n, len(c) - 1)], 0.0)
        with np.errstate(divide="ignore"):
            return np.sign(vals), np.log(np.abs(vals))


# ---------------------------------------------------------------------------
# the series type


@dataclass(frozen=True)
class EvenSeries:
    """``sum a_n w**n`` with ``w = z`` or ``w = z**2``.

    ``length`` marks a finite (polynomial) series; otherwise the series is
    entire and its coefficient ratios tend to zero.
    """

    rule: CoeffRule
    variable: str = Z_SQUARED
    length: int | None = None
    name: str = ""
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self) -> None:
        if self.variable not in (Z, Z_SQUARED):
            raise ValueError(f"unknown series variable {self.variable!r}")

    @property
    def step(self) -> int:
        """Power of z carried by one step in n."""
        return 2 if self.variable == Z_SQUARED else 1

    def coefficients(self, count: int) -> tuple[np.ndarray, np.ndarray]:
        """Signs and log-magnitudes of ``a_0 .. a_{count-1}``."""
        if self.length is not None:
            count = min(count, self.length)
        cached = self._cache.get("coeffs")
        if cached is None or len(cached[0]) < count:
            size = max(count, 2 * len(cached[0]) if cached else 64)
            if self.length is not None:
                size = min(size, self.length)
            sign, logmag = self.rule(np.arange(size))
            sign = np.asarray(sign, dtype=float)
            logmag = np.asarray(logmag, dtype=float)
            if np.any(np.isposinf(logmag)) or np.any(np.isnan(logmag)):
                raise ValueError(f"series {self.name or self.rule!r} has a non-finite coefficient")
            cached = (sign, logmag)
            self._cache["coeffs"] = cached
        return cached[0][:count], cached[1][:count]

    def leading(self, count: int) -> np.ndarray:
        """Plain float values of the first ``count`` coefficients."""
        sign, logmag = self.coefficients(count)
        out = np.zeros(count)
        out[: len(sign)] = sign * np.exp(logmag)
        return out

    def in_variable(self, variable: str) -> "EvenSeries":
        """Same coefficients read in another variable (``K(z)`` -> ``K(sqrt z)``)."""
        return EvenSeries(self.rule, variable, self.length, self.name)


@dataclass(frozen=True)
class EvalResult:
    value: complex | float | np.ndarray
    d1: complex | float | np.ndarray
    d2: complex | float | np.ndarray
    tail_bound: float
    terms_used: int


# ---------------------------------------------------------------------------
# truncation


def _log_falling(p: np.ndarray, j: int) -> np.ndarray:
    """log of p (p-1) ... (p-j+1); -inf where the product vanishes."""
    out = np.zeros(p.shape)
    with np.errstate(divide="ignore"):
        for i in range(j):
            out = out + np.log(np.maximum(p - i, 0.0))
    return out


def _log_terms(s: EvenSeries, r: float, count: int, j: int) -> np.ndarray:
    """log |d^j/dz^j (a_n z^{p_n})| on |z| = r for n < count."""
    sign, logmag = s.coefficients(count)
    p = s.step * np.arange(len(sign), dtype=float)
    logr = math.log(r) if r > 0 else -np.inf
    with np.errstate(invalid="ignore"):
        zpart = np.where(p - j > 0, (p - j) * logr, 0.0)
    out = np.where(sign == 0, -np.inf, logmag) + _log_falling(p, j) + zpart
    return np.where(np.isnan(out), -np.inf, out)


def _tail_bounds(s: EvenSeries, r: float, count: int, order: int) -> np.ndarray:
    """Tail bounds indexed [j, N] for summing the first N terms.

    Polynomials (and any series at r = 0) get exact tails.  Otherwise the
    bound is ``T_N / (1 - q)``, with T_N the first omitted term and q the
    largest ratio of successive terms over the next RATIO_WINDOW terms.
    """
    exact = s.length is not None or r == 0.0
    if s.length is not None:
        count = s.length
    rows = []
    for j in range(order + 1):
        logt = _log_terms(s, r, count, j)
        if exact:
            tail = np.cumsum(np.exp(logt)[::-1])[::-1]
            rows.append(np.append(tail, 0.0))
            continue
        with np.errstate(invalid="ignore"):
            dlog = np.diff(logt)
        dlog = np.where(np.isnan(dlog), -np.inf, dlog)
        qmax = sliding_window_view(dlog, RATIO_WINDOW).max(axis=1)
        nb = len(qmax)
        with np.errstate(over="ignore"):
            q = np.exp(qmax)
            bound = np.where(q < 1.0, np.exp(logt[:nb]) / np.maximum(1.0 - q, 1e-300), np.inf)
        rows.append(bound)
    return np.vstack(rows)


def tail_bound(s: EvenSeries, r: float, n_terms: int, order: int = 0) -> float:
    """Bound on the omitted part when ``n_terms`` terms are summed on ``|z| = r``.

    The maximum over derivative orders ``0..order`` is returned.
    """
    if s.length is not None and n_terms >= s.length:
        return 0.0
    bounds = _tail_bounds(s, r, n_terms + RATIO_WINDOW + 2, order)
    return float(bounds[:, n_terms].max())


def truncation_index(s: EvenSeries, r: float, eps: float = DEFAULT_EPS, order: int = 0) -> int:
    """Smallest number of leading terms whose tail bound on ``|z| = r`` is below eps."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if r < 0:
        raise ValueError("r must be nonnegative")
    count = 64
    while True:
        bounds = _tail_bounds(s, r, count + RATIO_WINDOW + 1, order).max(axis=0)
        ok = np.nonzero(bounds < eps)[0]
        if len(ok):
            n = max(int(ok[0]), 1)
            if n > TERM_CAP:
                break
            return n
        if s.length is not None or count >= TERM_CAP:
            break
        count = min(2 * count, TERM_CAP)
    raise TruncationCapExceeded(
        f"series {s.name or 'kernel'} needs more than {TERM_CAP} terms at |z|={r:g}"
    )


def magnitude_sum(s: EvenSeries, r: float, order: int = 0, eps: float = DEFAULT_EPS) -> float:
    """``sum |d^j/dz^j (a_n z^p_n)|`` on ``|z| = r``: the scale of rounding error in a sum at r."""
    n_terms = truncation_index(s, r, eps, order)
    logt = _log_terms(s, r, n_terms, order)
    return float(np.exp(logsumexp(logt))) if np.isfinite(logt).any() else 0.0


# ---------------------------------------------------------------------------
# evaluation


def _sum_terms(s: EvenSeries, z: np.ndarray, n_terms: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    sign, logmag = s.coefficients(n_terms)
    m = len(sign)
    p = s.step * np.arange(m, dtype=float)
    live = sign != 0
    sign, logmag, p = sign[live], logmag[live], p[live]
    with np.errstate(divide="ignore"):
        logz = np.log(z.astype(complex))[:, None]
    out = []
    for j in range(3):
        lf = _log_falling(p, j)
        keep = np.isfinite(lf)
        pw = (p - j)[keep]
        with np.errstate(invalid="ignore"):
            zpart = np.where(pw[None, :] == 0, 0.0, pw[None, :] * logz)
        zpart = np.where(np.isnan(zpart), -np.inf, zpart)
        terms = sign[keep][None, :] * np.exp(logmag[keep][None, :] + lf[keep][None, :] + zpart)
        out.append(terms.sum(axis=1))
    return out[0], out[1], out[2]


def _truncation(s: EvenSeries, r: float, eps: float) -> tuple[int, float]:
    # circles are sampled point by point, so the same r recurs many times
    table = s._cache.setdefault("truncation", {})
    if r > 0:
        # round r up to 40 bits (about 12 digits) so points on one circle
        # share an entry; tails grow with r, so the bound stays valid
        m, e = math.frexp(r)
        r = math.ldexp(math.ceil(math.ldexp(m, 40)), e - 40)
    key = (r, eps)
    hit = table.get(key)
    if hit is None:
        if len(table) >= TRUNCATION_MEMO:
            table.clear()
        n_terms = truncation_index(s, r, eps, order=2)
        hit = table[key] = (n_terms, tail_bound(s, r, n_terms, order=2))
    return hit


def evaluate(s: EvenSeries, z, eps: float = DEFAULT_EPS) -> EvalResult:
    """Value and first two z-derivatives of the series at ``z``.

    ``z`` may be a scalar or an array; real input gives real output.  Enough
    terms are summed that all three tails are below ``eps`` at ``max |z|``.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    arr = np.atleast_1d(np.asarray(z))
    real = not np.iscomplexobj(arr)
    r = float(np.max(np.abs(arr))) if arr.size else 0.0
    n_terms, bound = _truncation(s, r, eps)
    v, d1, d2 = _sum_terms(s, arr, n_terms)
    if real:
        v, d1, d2 = v.real, d1.real, d2.real
    if np.ndim(z) == 0:
        v, d1, d2 = v[0], d1[0], d2[0]
        if real:
            v, d1, d2 = float(v), float(d1), float(d2)
        else:
            v, d1, d2 = complex(v), complex(d1), complex(d2)
    return EvalResult(v, d1, d2, bound, n_terms)


# ---------------------------------------------------------------------------
# named series


def wright(kappa: float, delta: float, x: float = 1.0, *, normalized: bool = False,
           variable: str = Z) -> EvenSeries:
    """``Phi(kappa, delta, x w) = sum (x w)^n / (n! Gamma(kappa n + delta))``.

    With ``normalized`` the series is multiplied by ``Gamma(delta)``.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    log_const, sgn = (float(gammaln(delta)), float(gammasgn(delta))) if normalized else (0.0, 1.0)
    rule = GammaRatioRule((), ((1.0, 1.0), (kappa, delta)), x, log_const, sgn)
    return EvenSeries(rule, variable, name=f"wright({kappa:g},{delta:g})")


def prabhakar(mu: float, nu: float, a: float, x: float = 1.0, *, normalized: bool = False,
              variable: str = Z) -> EvenSeries:
    """Three-parameter Mittag-Leffler ``sum (a)_n (x w)^n / (n! Gamma(mu n + nu))``."""
    if mu <= 0 or a <= 0:
        raise ValueError("mu and a must be positive")
    log_const = -float(gammaln(a))
    sgn = 1.0
    if normalized:
        log_const += float(gammaln(nu))
        sgn = float(gammasgn(nu))
    rule = GammaRatioRule(((1.0, a),), ((1.0, 1.0), (mu, nu)), x, log_const, sgn)
    return EvenSeries(rule, variable, name=f"prabhakar({mu:g},{nu:g},{a:g})")


def hyp1f2(a: float, b1: float, b2: float, x: float = 1.0, *, variable: str = Z) -> EvenSeries:
    """``1F2(a; b1, b2; x w)``."""
    log_const = float(gammaln(b1) + gammaln(b2) - gammaln(a))
    sgn = float(gammasgn(b1) * gammasgn(b2) * gammasgn(a))
    rule = GammaRatioRule(((1.0, a),), ((1.0, b1), (1.0, b2), (1.0, 1.0)), x, log_const, sgn)
    return EvenSeries(rule, variable, name=f"1F2({a:g};{b1:g},{b2:g})")


def q_series(beta: float, p: float, c: float, x: float = 1.0, *, variable: str = Z) -> EvenSeries:
    """Ramanujan-type ``A_p^(beta)(c, x w) = sum (c;p)_n p^(beta n^2) (x w)^n / (p;p)_n``."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    if beta <= 0:
        raise ValueError("beta must be positive")
    return EvenSeries(QSeriesRule(beta, p, c, x), variable, name=f"A({beta:g},{p:g},{c:g})")


def polynomial(coeffs: Sequence[float], *, variable: str = Z) -> EvenSeries:
    coeffs = tuple(float(c) for c in coeffs)
    if not coeffs:
        raise ValueError("empty polynomial")
    return EvenSeries(PolynomialRule(coeffs), variable, length=len(coeffs), name="poly")
