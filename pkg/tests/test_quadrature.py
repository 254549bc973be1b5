import math

import numpy as np
import pytest

from fracext.quadrature import (
    DecayHint,
    QuadratureError,
    integrate_halfline,
    integrate_interval,
    integrate_oscillatory_halfline,
    richardson_limit,
    richardson_multi,
)

EXP_TAIL = DecayHint("exponential-at-infinity")


def test_interval_linear():
    r = integrate_interval(lambda s: s, 0.0, 1.0)
    assert abs(r.value - 0.5) < 1e-14
    assert r.evaluations > 0


def test_interval_beta_endpoint():
    # int_0^1 (1-s)^{-1/2} ds = 2, integrated in the distance variable
    r = integrate_interval(lambda d: d ** -0.5, 1e-300, 1.0, tol=1e-9)
    assert abs(r.value - 2.0) < 2e-4  # raw adaptive on the singular integrand
    from fracext.quadrature import _graded_interval
    r = _graded_interval(lambda d: d ** -0.5, 0.0, 1.0, 1e-11, q_left=-0.5)
    assert abs(r.value - 2.0) < 1e-10


def test_interval_complex_oscillation():
    r = integrate_interval(lambda s: np.exp(1j * s), 0.0, math.pi)
    assert abs(r.value - 2j) < 1e-12


def test_halfline_exponential():
    r = integrate_halfline(lambda t: np.exp(-t), [EXP_TAIL])
    assert abs(r.value - 1.0) < 1e-9


def test_halfline_gamma_half():
    r = integrate_halfline(
        lambda t: t ** -0.5 * np.exp(-t),
        [DecayHint("algebraic-singularity-at-zero", exponent=-0.5), EXP_TAIL])
    assert abs(r.value - math.sqrt(math.pi)) < 1e-9


def test_halfline_kernel_normalization():
    def b(t):
        return np.exp(-1.0 / (4.0 * t)) * t ** -1.5 / (2.0 * math.sqrt(math.pi))

    r = integrate_halfline(b, [DecayHint("essential-singularity-at-zero"),
                               DecayHint("algebraic-at-infinity", power=1.5)])
    assert abs(r.value - 1.0) < 1e-9


def test_halfline_linearity():
    f = lambda t: np.exp(-t)
    g = lambda t: t * np.exp(-2.0 * t)
    hint = [EXP_TAIL]
    a, b = 2.3, -0.7
    lhs = integrate_halfline(lambda t: a * f(t) + b * g(t), hint)
    rhs_f = integrate_halfline(f, hint)
    rhs_g = integrate_halfline(g, hint)
    bound = rhs_f.error_estimate + rhs_g.error_estimate + lhs.error_estimate + 1e-12
    assert abs(lhs.value - (a * rhs_f.value + b * rhs_g.value)) < bound


def test_halfline_substitution_invariance():
    # int f(t) dt = int f(1/s)/s^2 ds for the kernel corpus
    def f(t):
        return np.exp(-1.0 / (4.0 * t)) * t ** -1.3 * np.exp(-0.2 * t)

    r1 = integrate_halfline(f, [DecayHint("essential-singularity-at-zero"), EXP_TAIL],
                            tol=1e-11)

    def g(s):
        return f(1.0 / s) / s ** 2

    r2 = integrate_halfline(g, [DecayHint("essential-singularity-at-zero"), EXP_TAIL],
                            tol=1e-11)
    assert abs(r1.value - r2.value) / abs(r1.value) < 1e-9


def test_halfline_zero_integrand():
    r = integrate_halfline(lambda t: np.zeros_like(t), [EXP_TAIL])
    assert r.value == 0.0
    assert r.error_estimate == 0.0


def test_halfline_nan_detection():
    def f(t):
        return np.where(t > 10.0, np.nan, np.exp(-t))

    with pytest.raises(QuadratureError):
        integrate_halfline(f, [EXP_TAIL])


def test_decay_hint_validation():
    with pytest.raises(ValueError):
        DecayHint("algebraic-singularity-at-zero", exponent=-1.5)
    with pytest.raises(ValueError):
        DecayHint("algebraic-at-infinity", power=0.9)
    with pytest.raises(ValueError):
        DecayHint("no-such-kind")


def test_oscillatory_poisson_integral():
    # (2/pi) int_0^inf y/(y^2+t^2) cos t dt = e^{-y}
    for y in (0.5, 1.0):
        r = integrate_oscillatory_halfline(
            lambda t: (2.0 / math.pi) * y / (y * y + t * t) * np.cos(t),
            omega=1.0, tol=1e-11)
        assert abs(r.value - math.exp(-y)) < 1e-9


def test_oscillatory_fresnel_type():
    # int_0^inf t^{-1/2} cos t dt = sqrt(pi/2)
    r = integrate_oscillatory_halfline(lambda t: t ** -0.5 * np.cos(t),
                                       omega=1.0, zero_exponent=-0.5, tol=1e-11)
    assert abs(r.value - math.sqrt(math.pi / 2.0)) < 1e-9


def test_richardson_linear_exact():
    samples = [(0.5 * 0.7 ** k, 2.0 + 0.5 * 0.7 ** k) for k in range(6)]
    L, diag = richardson_limit(samples, 1.0)
    assert abs(L - 2.0) < 1e-13
    assert diag < 1e-12


def test_richardson_polynomial_in_y_p():
    # exact polynomial in y^p recovers L to machine precision
    p = 0.6
    samples = [(0.8 * 0.65 ** k,
                3.0 + 2.0 * (0.8 * 0.65 ** k) ** p - 1.5 * (0.8 * 0.65 ** k) ** (2 * p))
               for k in range(8)]
    L, _ = richardson_limit(samples, p)
    assert abs(L - 3.0) < 1e-12


def test_richardson_exponential():
    samples = [(0.5 * 0.7 ** k, math.exp(-0.5 * 0.7 ** k)) for k in range(10)]
    L, diag = richardson_limit(samples, 1.0)
    assert abs(L - 1.0) < 1e-12


def test_richardson_scalar_extension_derivative():
    # y^0 u'(y) for u(y) = e^{-y} extrapolates to -1
    samples = [(0.5 * 0.7 ** k, -math.exp(-0.5 * 0.7 ** k)) for k in range(10)]
    L, _ = richardson_limit(samples, 1.0)
    assert abs(L + 1.0) < 1e-12


def test_richardson_drop_stability():
    samples = [(0.5 * 0.7 ** k, 1.0 + (0.5 * 0.7 ** k) ** 1.3) for k in range(9)]
    L_full, diag = richardson_limit(samples, 1.3)
    L_drop, _ = richardson_limit(samples[1:], 1.3)
    assert abs(L_full - L_drop) <= 10.0 * max(diag, 1e-14)


def test_richardson_errors():
    with pytest.raises(ValueError):
        richardson_limit([(1.0, 1.0), (0.5, 1.0)], 1.0)
    with pytest.raises(ValueError):
        richardson_limit([(1.0, 1.0), (0.5, 1.0), (0.3, 1.0)], 1.0)  # not geometric


def test_richardson_multi_mixed_exponents():
    ys = [0.5 * 0.7 ** k for k in range(10)]
    samples = [(y, 1.0 + 0.7 * y ** 0.5 + 0.2 * y ** 2) for y in ys]
    L, _ = richardson_multi(samples, [0.5, 2.0, 2.5])
    assert abs(L - 1.0) < 1e-12


def test_richardson_vector_values():
    ys = [0.5 * 0.7 ** k for k in range(8)]
    samples = [(y, np.array([2.0 + y, -1.0 + 3.0 * y])) for y in ys]
    L, _ = richardson_limit(samples, 1.0)
    assert np.allclose(L, [2.0, -1.0], atol=1e-12)


def test_oscillatory_panel_cap():
    # a tail too slow for the panel budget raises rather than returning junk
    with pytest.raises(QuadratureError):
        integrate_oscillatory_halfline(lambda t: np.cos(t) / np.log(t + 2.0),
                                       omega=1.0, tol=1e-13, max_panels=8)
