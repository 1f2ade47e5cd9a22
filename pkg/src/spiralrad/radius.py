"""Radii of gamma-spirallikeness of order alpha and its convex analog.

For every form the radius is the root of

    Theta(r) = Q(r) - 1 + (1 - alpha) cos(gamma)

on ``(0, B)``, where ``Q`` is ``z f'/f`` (spirallike) or ``1 + z f''/f'``
(convex) and ``B`` is the first positive singularity of ``Q``.  Theta
starts at ``(1 - alpha) cos(gamma) > 0`` and decreases to minus infinity,
so plain bisection finds the unique root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable

from .families import InvalidParameters, Legendre, NormalizedForm, Norm
from .series import evaluate
from .zeros import derivative_zeros, kernel_zeros

SPIRALLIKE = "spirallike"
CONVEX = "convex"
KINDS = (SPIRALLIKE, CONVEX)

DEFAULT_TOL = 1e-10
RESIDUAL_TOL = 1e-10
# lower end of the bisection bracket, relative to B
FLOOR = 1e-14
MAX_ITER = 400

UNCERTIFIED = "uncertified"
DISK_VALID = "disk_valid"
SHARP_AT_GAMMA0 = "sharp_at_gamma0"


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class SpiralOrder:
    gamma: float
    alpha: float

    def __post_init__(self) -> None:
        if not abs(self.gamma) < math.pi / 2:
            raise InvalidParameters("gamma must satisfy |gamma| < pi/2")
        if not 0 <= self.alpha < 1:
            raise InvalidParameters("alpha must lie in [0, 1)")

    @property
    def c(self) -> float:
        return (1.0 - self.alpha) * math.cos(self.gamma)


@dataclass(frozen=True)
class RadiusResult:
    radius: float
    bracket: tuple[float, float]
    residual: float
    iterations: int
    kind: str
    certification: str = UNCERTIFIED


def _check_kind(kind: str) -> None:
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")


@lru_cache(maxsize=512)
def singularity(form: NormalizedForm, kind: str) -> float:
    """First positive pole of ``Q`` for the given kind.

    Spirallike: first zero of the kernel.  Convex: first zero of the
    derivative function, and for F-forms also of the kernel, whichever
    comes first.
    """
    _check_kind(kind)
    if isinstance(form.spec, Legendre) and form.spec.n == 1:
        raise SolverError("P_1(z) = z has no positive zero; the radius is infinite")
    if kind == SPIRALLIKE:
        return kernel_zeros(form, 1)[0]
    b = derivative_zeros(form, 1)[0]
    if form.norm is Norm.F:
        b = min(b, kernel_zeros(form, 1)[0])
    return b


def theta_for_coefficient(form: NormalizedForm, kind: str, coefficient: float) -> tuple[Callable[[float], float], tuple[float, float]]:
    """``Q(r) - 1 + coefficient`` with its bracket ``(0, B)``."""
    _check_kind(kind)
    if form.norm is Norm.F and form.exponent < 0:
        # f = z K**(1/e) then has a pole at the first kernel zero and Theta
        # rises to +inf there, for both kinds
        raise InvalidParameters(
            f"{form.spec.family} F-form with exponent {form.exponent:g} < 0: "
            "Theta increases to +inf on (0, B) and has no root"
        )
    q = form.star if kind == SPIRALLIKE else form.convex
    b = singularity(form, kind)

    def theta(r: float) -> float:
        return float(q(r)) - 1.0 + coefficient

    return theta, (0.0, b)


def theta(form: NormalizedForm, kind: str, spiral: SpiralOrder, *,
          paper_literal_legendre: bool = False) -> tuple[Callable[[float], float], tuple[float, float]]:
    """The decreasing function whose root is the radius, and its bracket.

    With ``paper_literal_legendre`` the Legendre equations are read with
    the bare coefficient ``(1 - alpha)`` in place of ``c``,
    i.e. ``r P'' + (1-alpha) P' = 0`` and ``r P' + (1-alpha) P = 0``.
    """
    coefficient = spiral.c
    if paper_literal_legendre and isinstance(form.spec, Legendre):
        coefficient = 1.0 - spiral.alpha if kind == CONVEX else 2.0 - spiral.alpha
    return theta_for_coefficient(form, kind, coefficient)


def bisect_decreasing(f: Callable[[float], float], lo: float, hi: float, tol: float = DEFAULT_TOL,
                      residual_tol: float = RESIDUAL_TOL) -> tuple[float, float, int]:
    """Root of a decreasing ``f`` with ``f(lo) > 0`` and ``f(hi-) = -inf``.

    ``hi`` itself is never evaluated.  Stops once the bracket is below
    ``tol`` relative and the residual below ``residual_tol``, or when the
    bracket cannot shrink further in floating point.
    """
    it = 0
    best, best_val = lo, f(lo)
    negative_seen = False
    while it < MAX_ITER:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        it += 1
        v = f(mid)
        if math.isnan(v):
            raise SolverError(f"Theta evaluation failed at r={mid!r}")
        if abs(v) < abs(best_val):
            best, best_val = mid, v
        if v > 0:
            lo = mid
        elif v < 0:
            hi = mid
            negative_seen = True
        else:
            return mid, 0.0, it
        if hi - lo <= tol * lo and abs(best_val) < residual_tol:
            break
    if not negative_seen:
        raise SolverError("Theta never changed sign on the bracket")
    return best, abs(best_val), it


def solve_radius(form: NormalizedForm, kind: str, spiral: SpiralOrder, tol: float = DEFAULT_TOL, *,
                 paper_literal_legendre: bool = False) -> RadiusResult:
    """Smallest positive root of the radius equation for ``form``."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    th, (_, b) = theta(form, kind, spiral, paper_literal_legendre=paper_literal_legendre)
    lo = FLOOR * b
    if not th(lo) > 0:
        raise SolverError(f"Theta({lo:.3g}) <= 0: radius below resolution")
    r, res, it = bisect_decreasing(th, lo, b, tol)
    return RadiusResult(r, (lo, b), res, it, kind)


def with_certification(result: RadiusResult, certification: str) -> RadiusResult:
    return replace(result, certification=certification)


# ---------------------------------------------------------------------------
# the radius equations with denominators cleared


def cleared_equation(form: NormalizedForm, kind: str, spiral: SpiralOrder, *,
                     paper_literal_legendre: bool = False) -> Callable[[float], float]:
    """Left-hand side of the radius equation with denominators cleared, as a function of r.

    These are built from raw derivatives of ``g``, ``h`` or ``Psi = r**e K``
    rather than from ``Q``, and serve as an independent cross-check of the
    root found through Theta.
    """
    _check_kind(kind)
    c = spiral.c
    e = form.exponent

    def kernel(r):
        return form.base_values(r, 1e-15)

    if isinstance(form.spec, Legendre):
        def poly(r):
            b, b1, b2 = kernel(r)
            return r * b, b + r * b1, 2 * b1 + r * b2

        if kind == CONVEX:
            coef = 1.0 - spiral.alpha if paper_literal_legendre else c
            return lambda r: r * poly(r)[2] + coef * poly(r)[1]
        if paper_literal_legendre:
            return lambda r: r * poly(r)[1] + (1.0 - spiral.alpha) * poly(r)[0]
        return lambda r: r * poly(r)[1] + (c - 1.0) * poly(r)[0]

    if kind == SPIRALLIKE:
        if form.norm is Norm.H:
            # sqrt(r) K'(sqrt r) + 2c K(sqrt r), with K the even kernel
            even = form.spec.kernel()

            def eq(r):
                s = math.sqrt(r)
                res = evaluate(even, s, 1e-15)
                return s * res.d1 + 2.0 * c * res.value
            return eq
        if form.norm is Norm.F:
            return lambda r: r * kernel(r)[1] + e * c * kernel(r)[0]
        return lambda r: r * kernel(r)[1] + c * kernel(r)[0]

    if form.norm is Norm.F:
        # r Psi''/Psi' + (1/e - 1) r Psi'/Psi + c, Psi = r^e K
        def eq(r):
            b, b1, b2 = kernel(r)
            psi = r**e * b
            psi1 = e * r ** (e - 1) * b + r**e * b1
            psi2 = e * (e - 1) * r ** (e - 2) * b + 2 * e * r ** (e - 1) * b1 + r**e * b2
            return r * psi2 / psi1 + (1.0 / e - 1.0) * r * psi1 / psi + c
        return eq

    # r g'' + c g' with g = r k(r) (G reads K in z^2, H reads k in z)
    def eq(r):
        b, b1, b2 = kernel(r)
        return r * (2 * b1 + r * b2) + c * (b + r * b1)
    return eq
