"""Closed-form g-function data for the even members of the hierarchy.

g(zeta) = (zeta - z0)^(3/2) p(zeta / z0) with
p(z) = 4/(2m+3) z0^m sum_j c_j z^(m-j),  c_j = (2j+1)!! / (2^j j!),
and g'(zeta) = (zeta - z0)^(1/2) r(zeta / z0) with
r(z) = 2 z0^m (z^m + sum_j b_j z^(m-j)),  b_j = (2j-1)!! / (2^j j!).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

import mpmath
import numpy as np

from pilab.errors import BranchViolation, OddOrderRequested


def double_factorial(n: int) -> int:
    if n <= 0:
        return 1
    return n * double_factorial(n - 2)


def c_coefficient(j: int) -> Fraction:
    return Fraction(double_factorial(2 * j + 1), 2 ** j * math.factorial(j))


def b_coefficient(j: int) -> Fraction:
    return Fraction(double_factorial(2 * j - 1), 2 ** j * math.factorial(j))


def radical_base(m: int) -> Fraction:
    """2^(m-1) (m+1)! / (2m+1)!!, whose (m+1)-th root is |z0|."""
    return Fraction(2 ** (m - 1) * math.factorial(m + 1), double_factorial(2 * m + 1))


def asymptotic_constant(m: int, sign_s: int) -> float:
    """Leading coefficient c in q ~ c |s|^(1/(m+1)) for t = 0."""
    return 0.5 * sign_s * float(radical_base(m)) ** (1.0 / (m + 1))


@dataclass(frozen=True)
class GFunctionSpec:
    m: int
    sign_s: int
    z0: float
    c_coeffs: Tuple[Fraction, ...]
    b_coeffs: Tuple[Fraction, ...]
    c_asym: float

    def p_coeffs(self) -> np.ndarray:
        """Float coefficients of p(z), highest degree first."""
        pref = 4.0 / (2 * self.m + 3) * self.z0 ** self.m
        return np.array([pref * float(c) for c in self.c_coeffs])


def make_gfunction(m: int, sign_s: int) -> GFunctionSpec:
    if m < 2 or m % 2:
        raise OddOrderRequested(f"g-function data needs an even m >= 2, got {m}", m=m)
    if sign_s not in (1, -1):
        raise ValueError("sign_s must be +1 or -1")
    rad = float(radical_base(m)) ** (1.0 / (m + 1))
    return GFunctionSpec(
        m=m,
        sign_s=sign_s,
        z0=-sign_s * rad,
        c_coeffs=tuple(c_coefficient(j) for j in range(m + 1)),
        b_coeffs=tuple(b_coefficient(j) for j in range(1, m + 1)),
        c_asym=0.5 * sign_s * rad,
    )


def g_eval(spec: GFunctionSpec, zeta: float) -> float:
    if zeta < spec.z0:
        raise BranchViolation(f"g is real only for zeta >= z0 = {spec.z0}", zeta=zeta)
    return (zeta - spec.z0) ** 1.5 * float(np.polyval(spec.p_coeffs(), zeta / spec.z0))


def theta_hat_eval(spec: GFunctionSpec, zeta: float, t: Sequence[float] = (),
                   s_abs: float = 1.0) -> float:
    """Principal-branch theta-hat on the real ray; the t_j sum is optional."""
    if zeta < 0:
        raise BranchViolation("theta-hat is evaluated on zeta >= 0 only", zeta=zeta)
    m = spec.m
    val = 4.0 / (2 * m + 3) * zeta ** ((2 * m + 3) / 2) + spec.sign_s * math.sqrt(zeta)
    for j, tj in enumerate(t, start=1):
        val += 4.0 / (2 * j + 1) * tj * s_abs ** ((j - m - 1) / (m + 1)) * zeta ** ((2 * j + 1) / 2)
    return val


def g_minus_theta_hat(spec: GFunctionSpec, zeta: float, dps: int = 40) -> float:
    """g - theta_hat in extended precision; the two cancel to O(zeta^(-1/2))."""
    with mpmath.workdps(dps):
        m = spec.m
        z0 = -spec.sign_s * mpmath.root(mpmath.mpf(radical_base(m).numerator)
                                        / radical_base(m).denominator, m + 1)
        z = mpmath.mpf(zeta)
        w = z / z0
        p = 4 / mpmath.mpf(2 * m + 3) * z0 ** m * sum(
            mpmath.mpf(c.numerator) / c.denominator * w ** (m - j)
            for j, c in enumerate(spec.c_coeffs))
        g = (z - z0) ** mpmath.mpf(1.5) * p
        th = 4 / mpmath.mpf(2 * m + 3) * z ** (mpmath.mpf(2 * m + 3) / 2) + spec.sign_s * mpmath.sqrt(z)
        return float(g - th)


# --- exact Sturm sequences -------------------------------------------------

def _poly_rem(a: List[Fraction], b: List[Fraction]) -> List[Fraction]:
    # coefficients highest degree first
    a = list(a)
    while len(a) >= len(b) and any(a):
        f = a[0] / b[0]
        for i in range(len(b)):
            a[i] -= f * b[i]
        a.pop(0)
    while a and a[0] == 0:
        a.pop(0)
    return a


def sturm_sequence(coeffs: Sequence[Fraction]) -> List[List[Fraction]]:
    p0 = [Fraction(c) for c in coeffs]
    while p0 and p0[0] == 0:
        p0.pop(0)
    n = len(p0) - 1
    p1 = [c * (n - i) for i, c in enumerate(p0[:-1])]
    seq = [p0, p1]
    while len(seq[-1]) > 1:
        r = _poly_rem(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])
    return seq


def _sign_changes(values: Sequence) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_real_roots(coeffs: Sequence[Fraction]) -> int:
    """Number of distinct real roots, by Sturm's theorem at -inf and +inf."""
    seq = sturm_sequence(coeffs)
    at_pos_inf = [p[0] for p in seq]
    at_neg_inf = [p[0] * (-1) ** (len(p) - 1) for p in seq]
    return _sign_changes(at_neg_inf) - _sign_changes(at_pos_inf)


def derivative_factor_poly(m: int) -> List[Fraction]:
    """z^m + sum_j b_j z^(m-j), highest degree first."""
    return [Fraction(1)] + [b_coefficient(j) for j in range(1, m + 1)]


@dataclass
class PositivityReport:
    m: int
    real_root_count: int
    g_min: dict            # sign_s -> min sampled g
    p_margin: dict         # sign_s -> min sampled p(zeta/z0) = g / (zeta - z0)^(3/2)
    n_samples: int

    @property
    def passed(self) -> bool:
        return (self.real_root_count == 0
                and all(v > 0 for v in self.g_min.values())
                and all(v > 0 for v in self.p_margin.values()))


def verify_positivity(spec: GFunctionSpec, n_samples: int = 4000,
                      span: float = 1e4) -> PositivityReport:
    """Sturm certificate for the g' factor, plus sampled g > 0 for both signs of s."""
    roots = count_real_roots(derivative_factor_poly(spec.m))
    g_min, p_margin = {}, {}
    offsets = np.geomspace(1e-8, span, n_samples)
    for sgn in (1, -1):
        sp = make_gfunction(spec.m, sgn)
        pc = sp.p_coeffs()
        zeta = sp.z0 + offsets
        pv = np.polyval(pc, zeta / sp.z0)
        gv = offsets ** 1.5 * pv
        g_min[sgn] = float(gv.min())
        p_margin[sgn] = float(pv.min())
    return PositivityReport(spec.m, roots, g_min, p_margin, n_samples)


def pi2_crosscheck() -> float:
    """|60^(2/7) c 60^(1/21) - 6^(1/3)| for c the m=2, s>0 asymptotic constant."""
    c = make_gfunction(2, 1).c_asym
    return abs(60 ** (2 / 7) * c * 60 ** (1 / 21) - 6 ** (1 / 3))


def pi2_crosscheck_mp(dps: int = 50) -> mpmath.mpf:
    with mpmath.workdps(dps):
        c = mpmath.mpf(1) / 2 * mpmath.cbrt(mpmath.mpf(4) / 5)
        return abs(mpmath.power(60, mpmath.mpf(2) / 7) * c * mpmath.power(60, mpmath.mpf(1) / 21)
                   - mpmath.cbrt(6))


def rescaled_pi2_leading(X: float) -> float:
    """U(X) from q's leading term via U = -60^(2/7) q, s = 60^(1/7) X."""
    s = 60 ** (1 / 7) * X
    c = asymptotic_constant(2, 1 if s >= 0 else -1)
    return -60 ** (2 / 7) * c * abs(s) ** (1 / 3)
