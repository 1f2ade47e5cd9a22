import math

import numpy as np
import numpy.testing as npt
import pytest
from scipy.special import jn_zeros, jnp_zeros

from spiralrad.families import Legendre, MittagLeffler, Ramanujan, Struve, Wright, make_form
from spiralrad.zeros import (
    NonSimpleZero,
    ScanBudgetExhausted,
    ZeroSequence,
    check_interlacing,
    derivative_zeros,
    initial_step,
    kernel_zeros,
    positive_zeros,
)

from _oracles import LEGENDRE_CUBIC_ZERO, WRIGHT_G_FIRST_ZERO


def seq(*xs):
    return ZeroSequence(tuple(xs), "test", 1e-12, True)


def test_wright_first_zero():
    zs = kernel_zeros(make_form(Wright(1, 2), "g"), 1)
    assert abs(zs[0] - WRIGHT_G_FIRST_ZERO) < 1e-9
    assert zs.certified_simple


def test_wright_zeros_within_reported_uncertainty():
    zs = kernel_zeros(make_form(Wright(1, 2), "g"), 10)
    ref = jn_zeros(1, 10) / 2
    npt.assert_allclose(zs.zeros[:4], ref[:4], atol=1e-9)
    # far zeros drift from cancellation; the drift must be owned up to
    assert np.all(np.abs(np.array(zs.zeros) - ref) <= np.array(zs.uncertainty))


def test_wright_derivative_zeros_are_bessel_prime_zeros():
    # G-form: (z K)' = 0  <=>  J1'(2z) = 0
    zs = derivative_zeros(make_form(Wright(1, 2), "g"), 3)
    npt.assert_allclose(zs.zeros, jnp_zeros(1, 3) / 2, atol=1e-9)


def test_h_form_zeros_are_squares():
    g = kernel_zeros(make_form(Wright(1, 2), "g"), 3)
    h = kernel_zeros(make_form(Wright(1, 2), "h"), 3)
    npt.assert_allclose(h.zeros, np.square(g.zeros), rtol=1e-11)


def test_struve_half_double_zeros():
    zs = kernel_zeros(make_form(Struve(0.5), "g"), 2)
    npt.assert_allclose(zs.zeros, [2 * math.pi, 4 * math.pi], atol=1e-9)
    assert zs.multiplicities == (2, 2)
    assert not zs.certified_simple


def test_struve_minus_half_zeros():
    zs = kernel_zeros(make_form(Struve(-0.5), "g"), 3)
    npt.assert_allclose(zs.zeros, [math.pi, 2 * math.pi, 3 * math.pi], atol=1e-9)


def test_legendre_cubic_zero():
    zs = kernel_zeros(make_form(Legendre(2), "g"), 1)
    assert zs[0] == pytest.approx(LEGENDRE_CUBIC_ZERO, abs=1e-12)


def test_legendre_zeros_match_numpy():
    n = 4
    zs = kernel_zeros(make_form(Legendre(n), "g"), n - 1)
    roots = np.polynomial.legendre.legroots([0] * (2 * n - 1) + [1])
    npt.assert_allclose(zs.zeros, np.sort(roots[roots > 1e-9]), atol=1e-11)


def test_factorization_with_rayleigh_tail():
    # log K(z) = sum log(1 - z^2/zeta_k^2); the omitted part is -z^2 s2 - z^4 s4 / 2 - ...
    # with s2, s4 the tails of sum zeta^-2 = 1/2 and sum zeta^-4 = 1/12 (Rayleigh sums for J1)
    form = make_form(Wright(1, 2), "g")
    zeta = np.array(kernel_zeros(form, 5).zeros)
    z = 0.5
    s2 = 0.5 - np.sum(zeta**-2.0)
    s4 = 1 / 12 - np.sum(zeta**-4.0)
    partial = np.prod(1 - z**2 / zeta**2) * math.exp(-(z**2) * s2 - z**4 * s4 / 2)
    k = form.kernel_function(z)[0]
    assert abs(partial - k) < 1e-6
    # the raw product alone converges slowly: this tail is what it leaves out
    assert abs(np.prod(1 - z**2 / zeta**2) - k) > 1e-3


@pytest.mark.parametrize(
    "form",
    [make_form(Wright(1, 2), "g"), make_form(MittagLeffler(3, 1, 1), "h"), make_form(Ramanujan(1, 0.5, 1), "f")],
    ids=lambda f: f"{f.spec.family}-{f.norm.value}",
)
def test_residual_and_stability(form):
    coarse = kernel_zeros(form, 3, tol=1e-10)
    fine = kernel_zeros(form, 3, tol=5e-11)
    step = initial_step(form.base)
    for x, (a, b) in zip(fine.zeros, fine.brackets):
        # the scan cell that enclosed the zero
        lo = math.floor(x / step) * step
        scale = max(abs(form.kernel_function(lo)[0]), abs(form.kernel_function(lo + step)[0]))
        assert abs(form.kernel_function(x)[0]) < 1e-9 * scale
        assert b - a <= 5e-11
    npt.assert_array_less(np.abs(np.subtract(coarse.zeros, fine.zeros)), 1e-10)


# --- scanner on plain functions ---


def test_scanner_sine():
    zs = positive_zeros(math.sin, 4, 0.3, derivative=math.cos)
    npt.assert_allclose(zs.zeros, np.pi * np.arange(1, 5), atol=1e-11)


def test_scanner_close_pair_with_derivative():
    f = lambda x: (x - 1.0) * (x - 1.0001) + 1e-12
    df = lambda x: 2 * x - 2.0001
    zs = positive_zeros(f, 2, 0.3, derivative=df)
    assert zs.zeros[0] == pytest.approx(1.0, abs=1e-7)
    assert zs.zeros[1] == pytest.approx(1.0001, abs=1e-7)


def test_scanner_close_pair_by_halving():
    f = lambda x: (x - 1.0) * (x - 1.001)
    zs = positive_zeros(f, 2, 0.3)
    npt.assert_allclose(zs.zeros, [1.0, 1.001], atol=1e-9)


def test_scanner_double_zero():
    f = lambda x: (x - 2.0) ** 2
    zs = positive_zeros(f, 1, 0.3, derivative=lambda x: 2 * (x - 2.0))
    assert zs.zeros[0] == pytest.approx(2.0, abs=1e-9)
    assert zs.multiplicities == (2,)
    with pytest.raises(NonSimpleZero):
        positive_zeros(f, 1, 0.3, derivative=lambda x: 2 * (x - 2.0), allow_multiple=False)


def test_scanner_budget():
    with pytest.raises(ScanBudgetExhausted):
        positive_zeros(lambda x: 1 + x * x, 1, 0.5, max_r=50)
    with pytest.raises(ScanBudgetExhausted):
        positive_zeros(lambda x: 1 + x * x, 1, 0.5, max_evals=100)


def test_initial_step_clamped():
    assert 1e-3 <= initial_step(make_form(Wright(1, 2), "g").base) <= 1.0


# --- interlacing ---


def test_interlacing_pattern():
    assert check_interlacing(seq(2.0, 4.0), seq(1.0, 3.0, 5.0))
    assert check_interlacing(seq(2.0, 4.0), seq(1.0, 4.5)) is False
    assert check_interlacing(seq(1.0, 2.0), seq(1.0, 2.0)) is False
    assert check_interlacing(seq(), seq(1.0)) is None


@pytest.mark.parametrize(
    "spec", [Wright(1, 2), Struve(0.3), Ramanujan(1, 0.5, 1)], ids=lambda s: s.family
)
@pytest.mark.parametrize("norm", ["f", "g", "h"])
def test_family_interlacing(spec, norm):
    form = make_form(spec, norm)
    assert check_interlacing(kernel_zeros(form, 3), derivative_zeros(form, 4))


def test_far_h_zero_within_budget():
    # first zero near 2.7e5: a uniform grid in r would need more than the evaluation budget
    spec = MittagLeffler(7, 3, 0.6755598252125995)
    h = kernel_zeros(make_form(spec, "h"), 1)
    g = kernel_zeros(make_form(spec, "g"), 1)
    assert h[0] == pytest.approx(g[0] ** 2, rel=1e-12)
    a, b = h.brackets[0]
    assert a <= h[0] <= b and b - a <= 1e-12 * h[0] + 1e-12
