"""Special-function families and their normalized forms.

Every family is reduced to an even kernel ``K`` with ``K(0) = 1`` whose
positive zeros are real.  The three normalizations are

* F: ``(z**e K(z))**(1/e)`` for the family exponent ``e``,
* G: ``z K(z)``,
* H: ``z K(sqrt z)``, carried as ``z k(z)`` with ``k(w) = K(sqrt w)``.

Only logarithmic derivatives of the forms are ever computed, so the
fractional outer power of the F-form is never evaluated.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import ClassVar


from . import series
from .series import DEFAULT_EPS, EvenSeries, Z, Z_SQUARED, evaluate

LEGENDRE_MAX_N = 50
WI_DEFAULT_DEPTH = 8


class InvalidParameters(ValueError):
    """Parameters outside the regime where the radius results apply."""


class Norm(str, Enum):
    F = "f"
    G = "g"
    H = "h"


# ---------------------------------------------------------------------------
# W_i membership for the Mittag-Leffler parameters


def in_wc(mu: Fraction, nu: Fraction) -> bool:
    """Base rectangle: 1 < mu < 2 and nu in [mu-1, 1] or [mu, 2]."""
    return 1 < mu < 2 and (mu - 1 <= nu <= 1 or mu <= nu <= 2)


def _apply(step: str, mu: Fraction, nu: Fraction) -> tuple[Fraction, Fraction]:
    if step == "A":
        return 2 * mu, nu
    if step == "B":
        return 2 * mu, mu + nu
    if step == "C":
        return (mu, nu - 1) if nu > 1 else (mu, nu)
    raise ValueError(f"unknown transformation {step!r}")


def replay_certificate(base: tuple[Fraction, Fraction], steps: tuple[str, ...]) -> tuple[Fraction, Fraction]:
    """Apply the transformation word ``steps`` to a point of W_c, in (mu, nu) coordinates."""
    mu, nu = base
    for step in steps:
        mu, nu = _apply(step, mu, nu)
    return mu, nu


@dataclass(frozen=True)
class WiVerdict:
    member: bool
    base: tuple[Fraction, Fraction] | None = None
    steps: tuple[str, ...] = ()

    @property
    def status(self) -> str:
        return "member" if self.member else "unknown"


def wi_membership(mu: float, nu: float, depth: int = WI_DEFAULT_DEPTH) -> WiVerdict:
    """Decide whether ``(1/mu, nu)`` is reachable from W_b within ``depth`` extra steps.

    The search runs backwards from the target through the preimages of the
    maps A, B, C in exact rational arithmetic and returns a certificate
    ``(base, steps)`` with ``base`` in W_c and ``steps[0]`` in {A, B}.  A
    failed search returns an ``unknown`` verdict, never a non-member.
    """
    if mu <= 1 or nu <= 0:
        raise InvalidParameters("W_i membership needs mu > 1 and nu > 0")
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    start = (Fraction(mu), Fraction(nu))
    # breadth first: state -> steps that lead from it to the target
    queue = deque([(start, ())])
    seen = {start}
    while queue:
        (m, n), tail = queue.popleft()
        half = m / 2
        if half > 1:
            if in_wc(half, n):
                return WiVerdict(True, (half, n), ("A",) + tail)
            if n - half > 0 and in_wc(half, n - half):
                return WiVerdict(True, (half, n - half), ("B",) + tail)
        if len(tail) >= depth:
            continue
        preimages = []
        if half > 1:
            preimages.append(((half, n), "A"))
            if n - half > 0:
                preimages.append(((half, n - half), "B"))
        preimages.append(((m, n + 1), "C"))
        for state, step in preimages:
            if state not in seen:
                seen.add(state)
                queue.append((state, (step,) + tail))
    return WiVerdict(False)


# ---------------------------------------------------------------------------
# Legendre polynomials


def legendre_poly(n: int) -> tuple[float, ...]:
    """Ascending coefficients of ``P_{2n-1}(z) / P'_{2n-1}(0)``."""
    if n < 1:
        raise InvalidParameters("Legendre index n must be >= 1")
    if n > LEGENDRE_MAX_N:
        raise InvalidParameters(f"Legendre index n={n} exceeds the cap {LEGENDRE_MAX_N}")
    degree = 2 * n - 1
    prev, cur = [Fraction(1)], [Fraction(0), Fraction(1)]
    for k in range(1, degree):
        nxt = [Fraction(0)] * (k + 2)
        for i, c in enumerate(cur):
            nxt[i + 1] += (2 * k + 1) * c
        for i, c in enumerate(prev):
            nxt[i] -= k * c
        prev, cur = cur, [c / (k + 1) for c in nxt]
    slope = cur[1]
    return tuple(float(c / slope) for c in cur)


# ---------------------------------------------------------------------------
# family specifications


@dataclass(frozen=True)
class Wright:
    kappa: float
    delta: float

    family: ClassVar[str] = "wright"
    norms: ClassVar[tuple[Norm, ...]] = (Norm.F, Norm.G, Norm.H)

    def __post_init__(self) -> None:
        if not (self.kappa > 0 and self.delta > 0):
            raise InvalidParameters("Wright family needs kappa > 0 and delta > 0")

    @property
    def exponent(self) -> float:
        return self.delta

    def kernel(self) -> EvenSeries:
        """``Gamma(delta) Phi(kappa, delta, -z^2)``."""
        return series.wright(self.kappa, self.delta, -1.0, normalized=True, variable=Z_SQUARED)


@dataclass(frozen=True)
class MittagLeffler:
    mu: float
    nu: float
    a: float
    assume_real_zeros: bool = field(default=False, compare=False)

    family: ClassVar[str] = "mittag-leffler"
    norms: ClassVar[tuple[Norm, ...]] = (Norm.F, Norm.G, Norm.H)

    def __post_init__(self) -> None:
        if not (self.mu > 1 and self.nu > 0 and self.a > 0):
            raise InvalidParameters("Mittag-Leffler family needs mu > 1, nu > 0, a > 0")
        if not self.assume_real_zeros and not wi_membership(self.mu, self.nu).member:
            raise InvalidParameters(
                f"(1/mu, nu) = (1/{self.mu:g}, {self.nu:g}) not shown to lie in W_i; "
                "pass assume_real_zeros to override"
            )

    @property
    def exponent(self) -> float:
        return self.nu

    def kernel(self) -> EvenSeries:
        """``Gamma(nu) M(mu, nu, a, -z^2)``."""
        return series.prabhakar(self.mu, self.nu, self.a, -1.0, normalized=True, variable=Z_SQUARED)


@dataclass(frozen=True)
class Legendre:
    n: int

    family: ClassVar[str] = "legendre"
    norms: ClassVar[tuple[Norm, ...]] = (Norm.G,)

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise InvalidParameters("Legendre index n must be an integer >= 1")
        if self.n > LEGENDRE_MAX_N:
            raise InvalidParameters(f"Legendre index n={self.n} exceeds the cap {LEGENDRE_MAX_N}")

    @property
    def exponent(self) -> float:
        return 1.0

    def kernel(self) -> EvenSeries:
        """Even polynomial ``P_{2n-1}(z) / (z P'_{2n-1}(0))``."""
        coeffs = legendre_poly(self.n)[1::2]
        return series.polynomial(coeffs, variable=Z_SQUARED)


@dataclass(frozen=True)
class Lommel:
    """Lommel function of the first kind at ``mu = u - 1/2``, ``nu = 1/2``."""

    u: float

    family: ClassVar[str] = "lommel"
    norms: ClassVar[tuple[Norm, ...]] = (Norm.F, Norm.G, Norm.H)

    def __post_init__(self) -> None:
        if not (-1 < self.u < 1) or self.u == 0:
            raise InvalidParameters("Lommel family needs u in (-1, 1), u != 0")

    @property
    def exponent(self) -> float:
        return self.u + 0.5

    def kernel(self) -> EvenSeries:
        """``1F2(1; (u+2)/2, (u+3)/2; -z^2/4)``."""
        return general_lommel_kernel(self.u - 0.5, 0.5)


def general_lommel_kernel(mu: float, nu: float) -> EvenSeries:
    """``1F2(1; (mu-nu+3)/2, (mu+nu+3)/2; -z^2/4)``, the series part of the Lommel function."""
    b1, b2 = (mu - nu + 3) / 2, (mu + nu + 3) / 2
    for b in (b1, b2):
        if b <= 0 and float(b).is_integer():
            raise InvalidParameters(f"Lommel parameters ({mu:g}, {nu:g}) hit a pole")
    return series.hyp1f2(1.0, b1, b2, -0.25, variable=Z_SQUARED)


@dataclass(frozen=True)
class Struve:
    beta: float

    family: ClassVar[str] = "struve"
    norms: ClassVar[tuple[Norm, ...]] = (Norm.F, Norm.G, Norm.H)

    def __post_init__(self) -> None:
        if not abs(self.beta) <= 0.5:
            raise InvalidParameters("Struve family needs |beta| <= 1/2")

    @property
    def exponent(self) -> float:
        return self.beta + 1.0

    def kernel(self) -> EvenSeries:
        """``1F2(1; 3/2, beta+3/2; -z^2/4)``."""
        return series.hyp1f2(1.0, 1.5, self.beta + 1.5, -0.25, variable=Z_SQUARED)


@dataclass(frozen=True)
class Ramanujan:
    beta: float
    p: float
    c: float

    family: ClassVar[str] = "ramanujan"
    norms: ClassVar[tuple[Norm, ...]] = (Norm.F, Norm.G, Norm.H)

    def __post_init__(self) -> None:
        if not (self.beta > 0 and 0 < self.p < 1 and self.c >= 0):
            raise InvalidParameters("Ramanujan family needs beta > 0, 0 < p < 1, c >= 0")

    @property
    def exponent(self) -> float:
        return self.beta

    def kernel(self) -> EvenSeries:
        """``A_p^(beta)(-c, -z^2)``."""
        return series.q_series(self.beta, self.p, -self.c, -1.0, variable=Z_SQUARED)


FamilySpec = Wright | MittagLeffler | Legendre | Lommel | Struve | Ramanujan

FAMILIES: dict[str, type] = {
    cls.family: cls for cls in (Wright, MittagLeffler, Legendre, Lommel, Struve, Ramanujan)
}


# ---------------------------------------------------------------------------
# normalized forms


@dataclass(frozen=True)
class NormalizedForm:
    """A family together with one of its normalizations.

    ``base`` is the kernel as read by the form (``K`` in z**2 for F and G,
    ``k`` in z for H) and ``exponent`` the power ``e`` in ``(z**e base)**(1/e)``;
    G and H are the case ``e = 1``.
    """

    spec: FamilySpec
    norm: Norm
    base: EvenSeries = field(compare=False, repr=False)
    exponent: float = field(compare=False)

    def base_values(self, z, eps: float = DEFAULT_EPS):
        """Base kernel value and first two derivatives at z."""
        res = evaluate(self.base, z, eps)
        return res.value, res.d1, res.d2

    def star(self, z, eps: float = DEFAULT_EPS):
        """``z f'(z) / f(z)``."""
        b, b1, _ = self.base_values(z, eps)
        return 1.0 + z * b1 / (self.exponent * b)

    def convex(self, z, eps: float = DEFAULT_EPS):
        """``1 + z f''(z) / f'(z)``."""
        e = self.exponent
        b, b1, b2 = self.base_values(z, eps)
        d = e * b + z * b1
        dd = (e + 1.0) * b1 + z * b2
        out = 1.0 + z * dd / d
        if e != 1.0:
            out = out + (1.0 / e - 1.0) * z * b1 / b
        return out

    def kernel_function(self, r: float, eps: float = DEFAULT_EPS) -> tuple[float, float]:
        """Base kernel and its derivative; its first positive zero bounds the spirallike radius."""
        b, b1, _ = self.base_values(r, eps)
        return b, b1

    def derivative_function(self, r: float, eps: float = DEFAULT_EPS) -> tuple[float, float]:
        """``e base + r base'`` (proportional to the derivative of ``r**e base``) and its derivative."""
        e = self.exponent
        b, b1, b2 = self.base_values(r, eps)
        return e * b + r * b1, (e + 1.0) * b1 + r * b2

    @property
    def squared_variable(self) -> bool:
        """True for H-forms, whose zeros are the squares of the kernel's."""
        return self.norm is Norm.H


def make_form(spec: FamilySpec, norm: Norm | str) -> NormalizedForm:
    norm = Norm(norm)
    if norm not in spec.norms:
        raise InvalidParameters(f"{spec.family} has no {norm.value}-normalization")
    kernel = spec.kernel()
    if norm is Norm.F:
        e = float(spec.exponent)
        if e == 0.0:
            raise InvalidParameters(f"{spec.family} F-form is undefined for exponent 0")
        return NormalizedForm(spec, norm, kernel, e)
    if norm is Norm.G:
        return NormalizedForm(spec, norm, kernel, 1.0)
    return NormalizedForm(spec, norm, kernel.in_variable(Z), 1.0)


def make_spec(family: str, **params) -> FamilySpec:
    """Build a family spec by name, e.g. ``make_spec("wright", kappa=1, delta=2)``."""
    try:
        cls = FAMILIES[family]
    except KeyError:
        raise InvalidParameters(f"unknown family {family!r}") from None
    try:
        return cls(**params)
    except TypeError as exc:
        raise InvalidParameters(str(exc)) from None
