import math
from fractions import Fraction

import mpmath
import pytest
import sympy as sp

from pilab.errors import BranchViolation, OddOrderRequested
from pilab.gfun import (
    asymptotic_constant, b_coefficient, c_coefficient, count_real_roots, derivative_factor_poly,
    g_eval, g_minus_theta_hat, make_gfunction, pi2_crosscheck, pi2_crosscheck_mp,
    rescaled_pi2_leading, theta_hat_eval, verify_positivity,
)

EVEN = range(2, 13, 2)


def test_m2_values():
    spec = make_gfunction(2, 1)
    assert spec.z0 == pytest.approx(-(4 / 5) ** (1 / 3), rel=1e-15)
    assert spec.z0 == pytest.approx(-0.9283178, abs=1e-7)
    assert spec.c_asym == pytest.approx(0.4641589, abs=1e-7)
    assert spec.c_coeffs == (1, Fraction(3, 2), Fraction(15, 8))
    assert spec.b_coeffs == (Fraction(1, 2), Fraction(3, 8))


@pytest.mark.parametrize("m", EVEN)
@pytest.mark.parametrize("sign", [1, -1])
def test_c_asym_is_half_minus_z0(m, sign):
    spec = make_gfunction(m, sign)
    assert abs(spec.c_asym + spec.z0 / 2) <= 1e-14 * abs(spec.c_asym)
    assert spec.c_asym == asymptotic_constant(m, sign)


def test_m4_constant():
    want = 0.5 * (2 ** 3 * math.factorial(5) / 945) ** (1 / 5)
    assert make_gfunction(4, 1).c_asym == pytest.approx(want, rel=1e-15)


@pytest.mark.parametrize("m", EVEN)
def test_coefficient_monotonicity(m):
    c = [c_coefficient(j) for j in range(m + 1)]
    b = [b_coefficient(j) for j in range(1, m + 1)]
    assert c[0] == 1
    assert all(x < y for x, y in zip(c, c[1:]))
    assert all(x > y for x, y in zip(b, b[1:]))
    for j, cj in enumerate(c):
        assert cj == Fraction(math.prod(range(1, 2 * j + 2, 2)), 2 ** j * math.factorial(j))


@pytest.mark.parametrize("m", EVEN)
def test_sturm_count_matches_sympy(m):
    coeffs = derivative_factor_poly(m)
    z = sp.Symbol("z")
    poly = sp.Poly([sp.Rational(c.numerator, c.denominator) for c in coeffs], z)
    assert count_real_roots(coeffs) == poly.count_roots() == 0


def test_sturm_counts_known_roots():
    # (z-1)(z+2)(z-1/3)
    coeffs = [Fraction(1), Fraction(2, 3), Fraction(-7, 3), Fraction(2, 3)]
    assert count_real_roots(coeffs) == 3
    assert count_real_roots([1, 0, 1]) == 0


def test_m2_discriminant():
    b1, b2 = b_coefficient(1), b_coefficient(2)
    assert b1 ** 2 - 4 * b2 == Fraction(1, 4) - Fraction(3, 2) < 0


@pytest.mark.parametrize("m", EVEN)
def test_positivity(m):
    assert verify_positivity(make_gfunction(m, 1), span=1e4).passed


@pytest.mark.parametrize("zeta", [10, 20, 40, 80])
def test_g_minus_theta_hat_decays_like_inverse_sqrt(zeta):
    spec = make_gfunction(2, 1)
    ratio = abs(g_minus_theta_hat(spec, 2 * zeta)) / abs(g_minus_theta_hat(spec, zeta))
    assert 0.6 <= ratio <= 0.8


def test_g_matches_high_precision_at_moderate_zeta():
    spec = make_gfunction(4, -1)
    direct = g_eval(spec, 3.0) - theta_hat_eval(spec, 3.0)
    assert direct == pytest.approx(g_minus_theta_hat(spec, 3.0), abs=1e-12)


def test_branch_and_order_errors():
    spec = make_gfunction(2, 1)
    with pytest.raises(BranchViolation):
        g_eval(spec, spec.z0 - 1)
    with pytest.raises(BranchViolation):
        theta_hat_eval(spec, -1.0)
    with pytest.raises(OddOrderRequested):
        make_gfunction(3, 1)


def test_theta_hat_time_terms_vanish_at_zero_time():
    spec = make_gfunction(4, 1)
    assert theta_hat_eval(spec, 2.0, t=(0.0, 0.0, 0.0)) == theta_hat_eval(spec, 2.0)
    assert theta_hat_eval(spec, 2.0, t=(1.0,)) != theta_hat_eval(spec, 2.0)


def test_pi2_crosscheck():
    assert pi2_crosscheck() < 1e-12
    assert pi2_crosscheck_mp() < mpmath.mpf(10) ** -45
    # U(X) ~ -6^(1/3) X^(1/3) for the rescaled equation
    assert rescaled_pi2_leading(8.0) == pytest.approx(-(6 ** (1 / 3)) * 2.0, rel=1e-13)
