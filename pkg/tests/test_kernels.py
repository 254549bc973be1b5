import cmath
import math

import numpy as np
import pytest

from fracext.kernels import (
    Kernel,
    SectorPoint,
    _HintedFn,
    convolve_halfline,
    eval_kernel,
    sobolev_norm,
    time_derivative,
    time_derivative_coefficients,
    weyl_derivative,
    weyl_integral,
    z_derivative,
    z_derivative_coefficients,
)
from fracext.quadrature import DecayHint, integrate_halfline
from fracext.specfun import FracOrder, cpow, gamma

SQRT_PI = math.sqrt(math.pi)


def _b(sigma, z):
    return Kernel("b", FracOrder(sigma), SectorPoint(z))


def _B(sigma, z):
    return Kernel("B", FracOrder(sigma), SectorPoint(z))


def test_sector_point_validation():
    SectorPoint(1.0)
    SectorPoint(cmath.exp(1j * math.pi / 8))
    with pytest.raises(ValueError):
        SectorPoint(cmath.exp(1j * math.pi / 3))  # outside pi/4
    with pytest.raises(ValueError):
        SectorPoint(0.0)
    # boundary admitted only for closed sectors
    zb = cmath.exp(1j * math.pi / 4)
    with pytest.raises(ValueError):
        SectorPoint(zb)
    SectorPoint(zb, closed=True)
    SectorPoint(1j, math.pi / 2, closed=True)


def test_eval_b_frozen_value():
    # direct substitution: (1/(2 sqrt(pi))) e^{-1} (1/4)^{-3/2} = (4/sqrt(pi)) e^{-1}
    v = eval_kernel(_b(0.5, 1.0), 0.25)
    assert abs(v - 4.0 / SQRT_PI * math.exp(-1.0)) < 1e-15


def test_eval_h():
    v = eval_kernel(Kernel("h", FracOrder(0.5)), 4.0)
    assert abs(v - 1.0 / (SQRT_PI * 2.0)) < 1e-15


def test_eval_B_minus_h_leading_order():
    # (e^{-z^2/(4t)} - 1)/(Gamma(s) t^{1-s}) ~ -z^2/(4 Gamma(s) t^{2-s})
    s = 0.3
    k = Kernel("B_minus_h", FracOrder(s), SectorPoint(1.0))
    t = 1e9
    lead = -1.0 / (4.0 * gamma(s) * t ** (2.0 - s))
    assert abs(eval_kernel(k, t) / lead - 1.0) < 1e-7


def test_eval_domain_error():
    with pytest.raises(ValueError):
        eval_kernel(_b(0.5, 1.0), -1.0)


def test_time_derivative_printed_forms():
    s, z, t = 0.37, complex(0.9, 0.3), 0.83
    kb, kB = _b(s, z), _B(s, z)
    assert abs(time_derivative(kb, 1, t)
               - (z * z / (4 * t * t) - (1 + s) / t) * eval_kernel(kb, t)) < 1e-15
    assert abs(time_derivative(kB, 1, t)
               - (z * z / (4 * t * t) - (1 - s) / t) * eval_kernel(kB, t)) < 1e-15


def test_z_derivative_printed_forms():
    s, z, t = 0.37, complex(0.9, 0.3), 0.83
    kb, kB = _b(s, z), _B(s, z)
    assert abs(z_derivative(kb, 1, t)
               - (2 * s / z - z / (2 * t)) * eval_kernel(kb, t)) < 1e-15
    assert abs(z_derivative(kb, 2, t)
               - (2 * s * (2 * s - 1) / z ** 2 - (4 * s + 1) / (2 * t)
                  + z ** 2 / (4 * t ** 2)) * eval_kernel(kb, t)) < 1e-15
    assert abs(z_derivative(kB, 1, t) + z / (2 * t) * eval_kernel(kB, t)) < 1e-16
    assert abs(z_derivative(kB, 2, t)
               - (z ** 2 / (4 * t ** 2) - 1 / (2 * t)) * eval_kernel(kB, t)) < 1e-16


def test_coefficient_tables_reproduce_printed_z_forms():
    # symbolic check of the generated tables against the printed n=1,2 rows
    s = 0.41
    c1 = z_derivative_coefficients("b", 1, s).table
    assert c1[0] == pytest.approx(2 * s) and c1[1] == pytest.approx(-0.5)
    c2 = z_derivative_coefficients("b", 2, s).table
    assert c2[0] == pytest.approx(2 * s * (2 * s - 1))
    assert c2[1] == pytest.approx(-(4 * s + 1) / 2)
    assert c2[2] == pytest.approx(0.25)
    cB1 = z_derivative_coefficients("B", 1, s).table
    assert cB1[0] == 0 and cB1[1] == pytest.approx(-0.5)
    cB2 = z_derivative_coefficients("B", 2, s).table
    assert cB2[0] == 0 and cB2[1] == pytest.approx(-0.5) and cB2[2] == pytest.approx(0.25)


def test_k0n_exact_product():
    s = 0.3
    for n in (1, 2, 4, 7):
        tab = time_derivative_coefficients("B", n, s).table
        expect = 1.0
        for i in range(1, n + 1):
            expect *= s - i
        assert abs(tab[0] - expect) < 1e-12 * abs(expect)


@pytest.mark.parametrize("kind", ["b", "B"])
@pytest.mark.parametrize("sigma", [0.3, 0.5, complex(0.4, 0.2)])
def test_higher_time_derivatives_vs_finite_differences(kind, sigma):
    k = Kernel(kind, FracOrder(sigma), SectorPoint(complex(1.0, 0.2)))
    t0, h = 0.7, 1e-5
    for n in (2, 3, 5):
        fd = (k.fn(n - 1)(np.array([t0 + h]))[0]
              - k.fn(n - 1)(np.array([t0 - h]))[0]) / (2 * h)
        dn = time_derivative(k, n, t0)
        assert abs(dn - fd) / max(abs(dn), 1e-30) < 1e-6


def test_b_minus_h_derivative_vs_finite_differences():
    k = Kernel("B_minus_h", FracOrder(0.3), SectorPoint(1.0))
    h = 1e-5
    fd = (k.fn(0)(np.array([5.0 + h]))[0] - k.fn(0)(np.array([5.0 - h]))[0]) / (2 * h)
    assert abs(k.fn(1)(np.array([5.0]))[0] - fd) < 1e-12


def test_derivative_order_cap():
    with pytest.raises(ValueError):
        _b(0.5, 1.0).fn(13)


def test_derB_identity():
    # z^{1-2s} dz B^{s,z} = s Gamma(-s)/(2^{2s-1} Gamma(s)) b^{1-s,z}
    s, z, t = 0.25, complex(1.0, 0.2), 0.7
    lhs = cpow(z, 1 - 2 * s) * z_derivative(_B(s, z), 1, t)
    rhs = (s * gamma(-s) / (2 ** (2 * s - 1) * gamma(s))
           * eval_kernel(_b(1 - s, z), t))
    assert abs(lhs - rhs) / abs(rhs) < 1e-10


def test_kernel_ode_and_euler_identities():
    rng = np.random.default_rng(5)
    for _ in range(12):
        s = rng.uniform(0.05, 0.95)
        z = rng.uniform(0.4, 1.6) * cmath.exp(1j * rng.uniform(-0.7, 0.7))
        t = rng.uniform(0.2, 3.0)
        for kind, euler_rhs in (("b", -2.0), ("B", -2.0 * (1 - s))):
            k = Kernel(kind, FracOrder(s), SectorPoint(z))
            dt1 = time_derivative(k, 1, t)
            ode = (z_derivative(k, 2, t) + (1 - 2 * s) / z * z_derivative(k, 1, t)
                   - dt1)
            terms = max(abs(z_derivative(k, 2, t)), abs(dt1), 1e-300)
            assert abs(ode) <= 1e-10 * terms
            euler = (2 * t * dt1 + z * z_derivative(k, 1, t)
                     - euler_rhs * eval_kernel(k, t))
            assert abs(euler) <= 1e-10 * max(abs(eval_kernel(k, t)), 1e-300)


def test_b_normalization_random_draws():
    rng = np.random.default_rng(6)
    for _ in range(20):
        s = rng.uniform(0.05, 0.95)
        z = rng.uniform(0.3, 2.0) * cmath.exp(1j * rng.uniform(-math.pi / 4 * 0.92,
                                                               math.pi / 4 * 0.92))
        k = _b(s, z)
        r = integrate_halfline(k.fn(0),
                               [DecayHint("essential-singularity-at-zero"),
                                DecayHint("algebraic-at-infinity", power=1 + s)],
                               tol=1e-11)
        assert abs(r.value - 1.0) < 1e-9


def test_b_vanishing_boundary():
    k = _b(0.4, 1.0)
    # at t = 1e-6 the e^{-z^2/(4t)} factor underflows every double
    assert abs(eval_kernel(k, 1e-6)) <= 1e-300
    t_big = 1e6
    big = abs(eval_kernel(k, t_big))
    bound = abs(cpow(1.0, 0.8)) / (4 ** 0.4 * abs(gamma(0.4))) * t_big ** (-1.4)
    assert big <= 1.0000001 * bound


def test_eps_approximation_monotone():
    k0 = _b(0.4, 1.0)
    base = sobolev_norm(k0, 1.0)
    gaps = []
    for eps in (1.0, 0.1, 0.01):
        ke = Kernel("b", FracOrder(0.4), SectorPoint(1.0), eps=eps)
        gaps.append(abs(sobolev_norm(ke, 1.0) - base))
    assert gaps[0] > gaps[1] > gaps[2]


def test_weyl_exponential_eigenfunction():
    e = Kernel("exp_eps", eps=0.7)
    for alpha in (0.5, 1.0, 1.7):
        v = weyl_derivative(e, alpha, 1.1)
        assert abs(v - 0.7 ** alpha * math.exp(-0.7 * 1.1)) < 1e-11
    v = weyl_integral(e, 0.8, 1.1)
    assert abs(v - 0.7 ** -0.8 * math.exp(-0.7 * 1.1)) < 1e-11


def test_weyl_integral_of_e1_at_zero():
    # (1/Gamma(1/2)) int_0^inf t^{-1/2} e^{-t} dt = 1; the spec's phi row
    # (h^{1/2} e_1) would diverge -- see the decisions ledger
    v = weyl_integral(Kernel("exp_eps", eps=1.0), 0.5, 0.0)
    assert abs(v - 1.0) < 1e-11


def test_weyl_minus_one_of_b_is_normalization():
    k = _b(0.35, 1.0)
    v = weyl_integral(k, 1.0, 0.0)
    assert abs(v - 1.0) < 1e-9


def test_weyl_integer_order_is_time_derivative():
    k = _b(0.3, 1.0)
    assert abs(weyl_derivative(k, 2.0, 0.8) - time_derivative(k, 2, 0.8)) == 0.0


def test_weyl_composition_half_half():
    e1 = Kernel("exp_eps", eps=1.0)

    def half(t):
        return np.array([weyl_derivative(e1, 0.5, float(u), tol=1e-13)
                         for u in np.atleast_1d(t)]).reshape(np.shape(t))

    inner = _HintedFn(half, 0.0, ("exponential", 1.0))
    comp = weyl_derivative(inner, 0.5, 0.9, tol=1e-11)
    once = weyl_derivative(e1, 1.0, 0.9)
    assert abs(comp - once) < 1e-9


def test_sobolev_norm_examples():
    assert abs(sobolev_norm(Kernel("exp_eps", eps=1.0), 0.0) - 1.0) < 1e-10
    # ||e_eps||_(alpha) = 1/eps for every alpha (the spec example's
    # "1 for all eps" is off; see the decisions ledger)
    assert abs(sobolev_norm(Kernel("exp_eps", eps=0.5), 1.0) - 2.0) < 1e-9
    assert abs(sobolev_norm(Kernel("exp_eps", eps=1.0), 1.0) - 1.0) < 1e-9


def test_sobolev_norm_b_bound():
    # ||b||_(N) <= C (|z|^2/Re z^2)^{N+sigma}; the z-independent constant is
    # measured at z = 1 and must cover an off-axis z
    s, N = 0.3, 1.0
    base = sobolev_norm(_b(s, 1.0), N)
    z = 1.2 * cmath.exp(1j * math.pi / 6)
    ratio = abs(z) ** 2 / (z * z).real
    val = sobolev_norm(_b(s, z), N)
    assert val <= 1.05 * base * ratio ** (N + s)


def test_h_alone_not_integrable_guarded():
    h = Kernel("h", FracOrder(0.5))
    with pytest.raises(ValueError):
        sobolev_norm(h, 0.0)
    from fracext.funcalc import pi_alpha
    from fracext.families import heat_semigroup
    from fracext.operators import LinearOperator
    fam = heat_semigroup(LinearOperator("diagonal", [-1.0]))
    with pytest.raises(ValueError):
        pi_alpha(h, fam, np.array([1.0]))


def test_convolution_h_b_equals_B():
    s = 0.3
    for sv in (0.5, 1.0, 2.0):
        conv = convolve_halfline(Kernel("h", FracOrder(s)), _b(s, 1.0), sv)
        ref = eval_kernel(_B(s, 1.0), sv)
        assert abs(conv - ref) / abs(ref) < 1e-8


def test_convolution_half_heaviside():
    # h^{1/2} * h^{1/2} = h^1 = 1
    c = convolve_halfline(Kernel("h", FracOrder(0.5)), Kernel("h", FracOrder(0.5)), 1.7)
    assert abs(c - 1.0) < 1e-10


def test_convolution_exponentials():
    c = convolve_halfline(Kernel("exp_eps", eps=1.0), Kernel("exp_eps", eps=1.0), 2.0)
    assert abs(c - 2.0 * math.exp(-2.0)) < 1e-11


def test_norm_continuity_in_z():
    # analyticity itself is not operationalized; norm continuity on a grid is
    s = 0.45
    zs = [1.0, 1.0 + 0.05j, 1.0 + 0.1j]
    norms = [sobolev_norm(_b(s, z), 1.0) for z in zs]
    assert abs(norms[1] - norms[0]) < 0.1
    assert abs(norms[2] - norms[1]) < 0.1


def test_kernel_validation():
    with pytest.raises(ValueError):
        Kernel("b", FracOrder(0.5), None)
    with pytest.raises(ValueError):
        Kernel("h", FracOrder(0.5), SectorPoint(1.0))
    with pytest.raises(ValueError):
        Kernel("exp_eps")
    with pytest.raises(ValueError):
        Kernel("exp_eps", eps=-1.0)
    with pytest.raises(ValueError):
        Kernel("nope")


def test_b_minus_h_norm_bound():
    # ||B - h||_(N) <= C |z|^{2N} / (Re z^2)^{N - sigma}: measure the
    # constant on the axis and check an off-axis z stays under it
    s, N = 0.4, 1.0
    base = sobolev_norm(Kernel("B_minus_h", FracOrder(s), SectorPoint(1.0)), N)
    z = 1.3 * cmath.exp(1j * math.pi / 6)
    bound_ratio = abs(z) ** (2 * N) / ((z * z).real ** (N - s))
    val = sobolev_norm(Kernel("B_minus_h", FracOrder(s), SectorPoint(z)), N)
    assert val <= 1.05 * base * bound_ratio
