"""Positive real zeros of kernels and derivative functions by sign scanning."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .families import Norm, NormalizedForm
from .series import EvenSeries, magnitude_sum

DEFAULT_TOL = 1e-12
MAX_EVALS = 200_000
# |f| at an interior extremum below this fraction of the cell scale is a double zero
DOUBLE_ZERO_RTOL = 1e-9
MAX_HALVINGS = 48
# rounding noise of a float sum, per unit of sum |terms|
ROUNDING = 8 * np.finfo(float).eps


class ZeroScanError(RuntimeError):
    """Scanning could not produce the requested zeros."""


class ScanBudgetExhausted(ZeroScanError):
    pass


class NonSimpleZero(ZeroScanError):
    pass


@dataclass(frozen=True)
class ZeroSequence:
    zeros: tuple[float, ...]
    target: str
    tol: float
    certified_simple: bool
    brackets: tuple[tuple[float, float], ...] = ()
    multiplicities: tuple[int, ...] = ()
    # position error from rounding in the series sum, at least tol
    uncertainty: tuple[float, ...] = ()

    def __len__(self) -> int:
        return len(self.zeros)

    def __getitem__(self, i):
        return self.zeros[i]


def initial_step(s: EvenSeries, squared: bool = False) -> float:
    """One tenth of the first root of the two-term truncation ``a0 + a1 w``, clamped to [1e-3, 1].

    ``squared`` measures the step in ``sqrt(r)`` for a series in ``w = r``.
    """
    a0, a1 = s.leading(2)
    if a0 * a1 >= 0:
        return 1.0
    w = -a0 / a1
    root = math.sqrt(w) if s.step == 2 or squared else w
    return min(max(0.1 * root, 1e-3), 1.0)


def _bisect(f: Callable[[float], float], a: float, b: float, fa: float, tol: float) -> tuple[float, float]:
    while b - a > tol:
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        fm = f(m)
        if fm == 0.0:
            return m, m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return a, b


class _Scanner:
    def __init__(self, f, df, tol, max_evals, allow_multiple):
        self.f = f
        self.df = df
        self.tol = tol
        self.max_evals = max_evals
        self.allow_multiple = allow_multiple
        self.evals = 0
        self.found: list[tuple[float, tuple[float, float], int]] = []

    def value(self, r: float) -> float:
        self.evals += 1
        if self.evals > self.max_evals:
            raise ScanBudgetExhausted(f"zero scan used more than {self.max_evals} evaluations")
        return float(self.f(r))

    def simple(self, a: float, b: float, fa: float) -> None:
        lo, hi = _bisect(self.value, a, b, fa, self.tol)
        self.found.append((0.5 * (lo + hi), (lo, hi), 1))

    def dip(self, a: float, b: float, fa: float, fb: float, depth: int = 0) -> None:
        """Examine (a, b) where |f| has an interior minimum but no sign change."""
        if self.df is not None:
            da, db = float(self.df(a)), float(self.df(b))
            if da * db < 0:
                lo, hi = _bisect(lambda r: float(self.df(r)), a, b, da, self.tol)
                x = 0.5 * (lo + hi)
                fx = self.value(x)
                if abs(fx) <= DOUBLE_ZERO_RTOL * max(abs(fa), abs(fb)):
                    # a sign flip this small is rounding noise at a double zero
                    self.double(x, (lo, hi))
                elif (fx > 0) != (fa > 0):
                    self.simple(a, x, fa)
                    self.simple(x, b, fx)
                return
        self.halve(a, b, fa, fb, max(abs(fa), abs(fb)), depth)

    def halve(self, a: float, b: float, fa: float, fb: float, scale: float, depth: int) -> None:
        """Resample (a, b) on four subcells and recurse into any remaining dip."""
        xs = [a + (b - a) * i / 4 for i in range(5)]
        fs = [fa] + [self.value(x) for x in xs[1:4]] + [fb]
        i = min(range(1, 4), key=lambda j: abs(fs[j]))
        tiny = abs(fs[i]) <= DOUBLE_ZERO_RTOL * scale
        if tiny and (depth + 1 >= MAX_HALVINGS or b - a <= self.tol):
            self.double(xs[i], (xs[i - 1], xs[i + 1]))
            return
        changes = [j for j in range(4) if fs[j] * fs[j + 1] < 0]
        if changes and not tiny:
            for j in changes:
                self.simple(xs[j], xs[j + 1], fs[j])
            return
        dip = abs(fs[i]) < abs(fs[i - 1]) and abs(fs[i]) < abs(fs[i + 1])
        if (dip or tiny) and depth + 1 < MAX_HALVINGS:
            self.halve(xs[i - 1], xs[i + 1], fs[i - 1], fs[i + 1], scale, depth + 1)

    def double(self, x: float, bracket: tuple[float, float]) -> None:
        if not self.allow_multiple:
            raise NonSimpleZero(f"non-simple zero near r={x:.12g}")
        self.found.append((x, bracket, 2))


def positive_zeros(
    f: Callable[[float], float],
    count: int,
    step: float,
    *,
    derivative: Callable[[float], float] | None = None,
    tol: float = DEFAULT_TOL,
    start: float = 0.0,
    max_r: float = math.inf,
    max_evals: int = MAX_EVALS,
    allow_multiple: bool = True,
    description: str = "",
) -> ZeroSequence:
    """The ``count`` smallest zeros of ``f`` in ``(start, max_r)``.

    ``f`` is sampled on a uniform grid of spacing ``step``.  Sign changes are
    refined by bisection to width ``tol``.  Three samples with a dip in
    ``|f|`` and no sign change trigger a closer look: with ``derivative``
    the extremum is located by bisection on the derivative (which separates a
    close pair or certifies a double zero); without it the cell is rescanned
    at half the step.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if not step > 0:
        raise ValueError("step must be positive")
    sc = _Scanner(f, derivative, tol, max_evals, allow_multiple)
    r0 = start
    f0 = sc.value(r0)
    if f0 == 0.0:
        r0 = start + 1e-3 * step
        f0 = sc.value(r0)
    prev: tuple[float, float] | None = None
    k = 0
    while len(sc.found) < count:
        k += 1
        r1 = start + k * step
        if r1 > max_r:
            raise ScanBudgetExhausted(f"found {len(sc.found)} of {count} zeros below r={max_r:g}")
        f1 = sc.value(r1)
        if f1 == 0.0:
            # land beside the exact zero and let the sign test decide
            r1 = r1 + 0.5 * tol
            f1 = sc.value(r1)
        if f0 * f1 < 0:
            sc.simple(r0, r1, f0)
            prev = None
        elif prev is not None and abs(f0) < abs(prev[1]) and abs(f0) < abs(f1) and prev[1] * f1 > 0:
            sc.dip(prev[0], r1, prev[1], f1)
            prev = None
        else:
            prev = (r0, f0)
        r0, f0 = r1, f1
    found = sorted(sc.found)[:count]
    return ZeroSequence(
        zeros=tuple(x for x, _, _ in found),
        target=description,
        tol=tol,
        certified_simple=all(m == 1 for _, _, m in found),
        brackets=tuple(b for _, b, _ in found),
        multiplicities=tuple(m for _, _, m in found),
    )


def check_interlacing(a: ZeroSequence, b: ZeroSequence) -> bool | None:
    """``b1 < a1 < b2 < a2 < ...`` over the common prefix.

    Returns None when either sequence is empty (nothing to compare).
    """
    k = min(len(a), len(b))
    if k == 0:
        return None
    chain = []
    for i in range(k):
        chain += [b[i], a[i]]
    if len(b) > k:
        chain.append(b[k])
    return all(x < y for x, y in zip(chain, chain[1:]))


# ---------------------------------------------------------------------------
# zeros of normalized forms


def root_bound(s: EvenSeries) -> float:
    """Cauchy bound on the zeros of a polynomial series; infinite for entire series.

    By Gauss-Lucas it also bounds the zeros of the derivative functions.
    """
    if s.length is None:
        return math.inf
    a = s.leading(s.length)
    w = 1.0 + float(np.max(np.abs(a[:-1] / a[-1])))
    return math.sqrt(w) if s.step == 2 else w


def _with_uncertainty(seq: ZeroSequence, noise: Callable[[float], float],
                      slope: Callable[[float], float]) -> ZeroSequence:
    """Attach ``rounding noise / |slope|`` to each simple zero.

    Far from the origin the alternating series cancel heavily and the
    computed zeros drift; this makes the drift visible instead of silent.
    """
    unc = []
    for x, m in zip(seq.zeros, seq.multiplicities):
        d = abs(slope(x))
        if m > 1 or d == 0:
            unc.append(float(math.sqrt(noise(x))) if m > 1 else math.inf)
        else:
            unc.append(max(seq.tol, float(noise(x) / d)))
    return replace(seq, uncertainty=tuple(unc))


def _form_zeros(form: NormalizedForm, fn: Callable[[float], tuple[float, float]], count: int,
                tol: float, description: str) -> ZeroSequence:
    if form.norm is not Norm.H:
        return positive_zeros(
            lambda r: fn(r)[0],
            count,
            initial_step(form.base),
            derivative=lambda r: fn(r)[1],
            tol=tol,
            max_r=root_bound(form.base),
            description=description,
        )
    # H-forms read the coefficients in w = z^2, so their zeros spread out quadratically;
    # scan in s = sqrt(r) at G-like spacing, then bisect simple zeros in r
    seq = positive_zeros(
        lambda s: fn(s * s)[0],
        count,
        initial_step(form.base, squared=True),
        derivative=lambda s: 2 * s * fn(s * s)[1],
        tol=tol,
        max_r=math.sqrt(root_bound(form.base)),
        description=description,
    )
    zeros, brackets = [], []
    for (a, b), m in zip(seq.brackets, seq.multiplicities):
        a, b = a * a, b * b
        if m == 1:
            fa = fn(a)[0]
            if fa != 0.0:
                a, b = _bisect(lambda r: fn(r)[0], a, b, fa, tol)
            else:
                b = a
        zeros.append(0.5 * (a + b))
        brackets.append((a, b))
    return replace(seq, zeros=tuple(zeros), brackets=tuple(brackets))


def kernel_zeros(form: NormalizedForm, count: int, tol: float = DEFAULT_TOL) -> ZeroSequence:
    """Positive zeros of the form's kernel (squared zeros for H-forms)."""
    seq = _form_zeros(form, form.kernel_function, count, tol, f"{form.spec.family} {form.norm.value}-kernel")
    return _with_uncertainty(
        seq,
        lambda r: ROUNDING * magnitude_sum(form.base, r),
        lambda r: form.kernel_function(r)[1],
    )


def derivative_zeros(form: NormalizedForm, count: int, tol: float = DEFAULT_TOL) -> ZeroSequence:
    """Positive zeros of ``e K + r K'``: of ``Psi'`` for F, of ``g'`` for G, of ``h'`` for H."""
    seq = _form_zeros(form, form.derivative_function, count, tol,
                      f"{form.spec.family} {form.norm.value}-derivative")
    e = form.exponent
    return _with_uncertainty(
        seq,
        lambda r: ROUNDING * (abs(e) * magnitude_sum(form.base, r) + r * magnitude_sum(form.base, r, 1)),
        lambda r: form.derivative_function(r)[1],
    )
