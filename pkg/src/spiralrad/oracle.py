"""Direct checks of the spirallike inequality on circles |z| = r.

``Re(e^{-i gamma} Q)`` is harmonic on the disk where ``Q`` is analytic, so
its minimum over a disk sits on the boundary circle.  The oracle samples
that circle, polishes the smallest samples with a bounded scalar
minimizer and compares against ``alpha cos(gamma)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .families import NormalizedForm
from .radius import (
    CONVEX,
    DISK_VALID,
    SHARP_AT_GAMMA0,
    KINDS,
    RadiusResult,
    SpiralOrder,
    singularity,
    solve_radius,
    with_certification,
)

DEFAULT_SAMPLES = 2048
TOL_CERT = 1e-8
# certify_disk looks at this fraction of R
INNER = 1.0 - 1e-3
# local minima polished per circle
POLISHED = 3
BRACKET_GROWTH = 60
FALLBACK_SCAN = 16


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True)
class BoundaryProfile:
    r: float
    kind: str
    gamma: float
    samples: int
    min_value: float
    argmin_angle: float
    grid_min: float


@dataclass(frozen=True)
class DiskVerdict:
    valid: bool
    r_checked: float
    min_value: float
    at_angle: float
    threshold: float

    @property
    def status(self) -> str:
        return DISK_VALID if self.valid else "violated"


@dataclass(frozen=True)
class EmpiricalRadius:
    radius: float
    crossing_found: bool
    solver_radius: float
    bracket: tuple[float, float]


def _q(form: NormalizedForm, kind: str):
    return form.convex if kind == CONVEX else form.star


def boundary_min(form: NormalizedForm, kind: str, gamma: float, r: float,
                 samples: int = DEFAULT_SAMPLES) -> BoundaryProfile:
    """Minimum of ``Re(e^{-i gamma} Q(r e^{i theta}))`` over theta.

    ``samples`` is the number of grid points on the full circle.  Only the
    upper half is evaluated: ``Q`` has real coefficients, so the lower half
    contributes ``Re(e^{+i gamma} Q)`` at the mirrored angles.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    if samples < 3:
        raise ValueError("samples must be >= 3")
    if not r > 0:
        raise ValueError("r must be positive")
    b = singularity(form, kind)
    if r >= b:
        raise OracleError(f"r={r:.12g} is at or beyond the first singularity {b:.12g} of Q")

    q = _q(form, kind)
    rot = complex(math.cos(gamma), -math.sin(gamma))
    half = samples // 2
    theta = 2.0 * math.pi * np.arange(half + 1) / samples
    vals = np.asarray(q(r * np.exp(1j * theta)), dtype=complex)
    upper = (rot * vals).real
    lower = (rot.conjugate() * vals).real
    # signed angles over the whole circle, in increasing order
    angles = np.concatenate([-theta[::-1], theta[1:]])
    values = np.concatenate([lower[::-1], upper[1:]])
    if samples % 2 == 0:
        # theta = pi appears twice
        angles, values = angles[1:], values[1:]
    if not np.all(np.isfinite(values)):
        raise OracleError(f"Q is not finite on |z| = {r:.12g}")

    def on_circle(t: float) -> float:
        return float((rot * q(r * complex(math.cos(t), math.sin(t)))).real)

    step = 2.0 * math.pi / samples
    best_t = float(angles[np.argmin(values)])
    best_v = float(values.min())
    grid_min = best_v
    # polish the smallest local minima of the periodic grid
    local = np.nonzero((values <= np.roll(values, 1)) & (values <= np.roll(values, -1)))[0]
    local = local[np.argsort(values[local])]
    for i in local[:POLISHED]:
        t0 = float(angles[i])
        res = minimize_scalar(on_circle, bounds=(t0 - step, t0 + step), method="bounded",
                              options={"xatol": 1e-12})
        if res.fun < best_v:
            best_t, best_v = float(res.x), float(res.fun)
    best_t = math.remainder(best_t, 2.0 * math.pi)
    return BoundaryProfile(r, kind, gamma, samples, best_v, best_t, grid_min)


def certify_disk(form: NormalizedForm, kind: str, spiral: SpiralOrder, R: float,
                 samples: int = DEFAULT_SAMPLES, tol_cert: float = TOL_CERT) -> DiskVerdict:
    """Check the defining inequality on the circle of radius ``(1 - 1e-3) R``."""
    r = INNER * R
    prof = boundary_min(form, kind, spiral.gamma, r, samples)
    threshold = spiral.alpha * math.cos(spiral.gamma)
    valid = prof.min_value >= threshold - tol_cert
    return DiskVerdict(valid, r, prof.min_value, prof.argmin_angle, threshold)


def empirical_radius(form: NormalizedForm, kind: str, spiral: SpiralOrder, tol: float = 1e-10,
                     samples: int = DEFAULT_SAMPLES, tol_cert: float = TOL_CERT,
                     solver_radius: float | None = None) -> EmpiricalRadius:
    """Largest r where the boundary minimum still clears ``alpha cos(gamma)``.

    The search starts from the solver radius and grows the upper end toward
    the singularity until the inequality fails, then locates the crossing
    with Brent's method.  A coarse scan of the bracket guards against a
    non-monotone boundary minimum by keeping the first sign change.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    threshold = spiral.alpha * math.cos(spiral.gamma)
    b = singularity(form, kind)
    R = solver_radius if solver_radius is not None else solve_radius(form, kind, spiral).radius

    def m(r: float) -> float:
        return boundary_min(form, kind, spiral.gamma, r, samples).min_value - threshold

    lo, m_lo = R, m(R)
    if m_lo < -tol_cert:
        raise OracleError(f"inequality already fails at the solver radius {R:.12g} (margin {m_lo:.3g})")
    shift = 1e-9 * R
    while m_lo <= 0:
        # the solver radius sits on the crossing; step just inside it
        lo = R - shift
        m_lo = m(lo)
        shift *= 4
        if shift > 1e-3 * R:
            raise OracleError("could not find a point with positive margin below the solver radius")

    hi = None
    for k in range(1, BRACKET_GROWTH + 1):
        cand = R + (b - R) * (1.0 - 2.0**-k)
        if cand <= lo or cand >= b:
            break
        if m(cand) < 0:
            hi = cand
            break
    if hi is None:
        return EmpiricalRadius(b, False, R, (lo, b))

    grid = np.linspace(lo, hi, FALLBACK_SCAN + 1)
    signs = [m(float(x)) for x in grid[1:-1]]
    for i, v in enumerate(signs):
        if v < 0:
            hi = float(grid[i + 1])
            lo = float(grid[i]) if i > 0 else lo
            break
    root = brentq(m, lo, hi, xtol=tol * R, rtol=4 * np.finfo(float).eps, maxiter=200)
    return EmpiricalRadius(float(root), True, R, (lo, hi))


def certified_radius(form: NormalizedForm, kind: str, spiral: SpiralOrder, tol: float = 1e-10,
                     samples: int = DEFAULT_SAMPLES, *, paper_literal_legendre: bool = False) -> RadiusResult:
    """Solve for the radius and attach the oracle's verdict.

    ``disk_valid`` when the boundary check passes at the solved radius;
    ``sharp_at_gamma0`` when in addition gamma = 0 and the inequality fails
    just outside (at 1.01 R).  Otherwise the result stays uncertified.
    """
    res = solve_radius(form, kind, spiral, tol, paper_literal_legendre=paper_literal_legendre)
    if not certify_disk(form, kind, spiral, res.radius, samples).valid:
        return res
    if spiral.gamma == 0 and 1.01 * res.radius < singularity(form, kind):
        if not certify_disk(form, kind, spiral, 1.01 * res.radius, samples).valid:
            return with_certification(res, SHARP_AT_GAMMA0)
    return with_certification(res, DISK_VALID)
