"""Initial data with a single negative hump, described through f_L.

f_L is the inverse of the decreasing branch of u0, so u0(f_L(u)) = u for
u in (-1, 0). Two families are provided:

* ``direct``: u0(x) = -sech^2((x - x_M) / b), with f_L(u) = x_M - b artanh(sqrt(1+u)).
* ``from_fL``: f_L(u) = x_M - sqrt(u+1) P(u) + beta sigma(u) log(-u), where P is a
  polynomial fixed by derivative constraints at u_c and sigma is a smooth switch
  that is identically 0 for u <= u_tail and 1 at u = 0. The log term sends
  f_L(0^-) to -infinity so that u0 decays like exp(x / beta) instead of
  reaching 0 with a corner.

The increasing branch is the mirror image about x_M, and the profile is tapered
to exactly zero near the edge of the periodic box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

import numpy as np
import sympy

from pilab.errors import ConfigInvalid, ConstraintSingular, MonotonicityLost

_BISECT_ITERS = 90
_LOG_FLOOR = -700.0


@dataclass(frozen=True)
class InitialDataSpec:
    mode: str                                  # "direct" or "from_fL"
    x_M: float = 0.0
    width: float = 1.0                         # direct: sech^2 width b
    beta: float = 0.5                          # from_fL: log-tail decay length
    P_coeffs: Tuple[float, ...] = ()           # from_fL: P in powers of u, lowest first
    u_tail: float = -0.4                       # from_fL: sigma vanishes for u <= u_tail
    L: float = 15.0
    taper: Tuple[float, float] = (0.6, 0.8)    # fractions of L where the taper starts / ends
    u_c_target: float | None = None
    m_target: int = 2

    def __post_init__(self):
        object.__setattr__(self, "P_coeffs", tuple(float(c) for c in self.P_coeffs))
        object.__setattr__(self, "taper", tuple(float(c) for c in self.taper))
        if self.mode not in ("direct", "from_fL"):
            raise ConfigInvalid(f"unknown initial-data mode {self.mode!r}")
        if self.mode == "from_fL" and not self.P_coeffs:
            raise ConfigInvalid("from_fL data needs P_coeffs")
        if not (self.beta > 0 and self.width > 0 and self.L > 0):
            raise ConfigInvalid("beta, width and L must be positive")
        a, b = self.taper
        if not 0 < a < b <= 1:
            raise ConfigInvalid("taper fractions must satisfy 0 < start < end <= 1")

    # --- f_L and its derivatives ---------------------------------------------

    def fL(self, u):
        u = np.asarray(u, dtype=float)
        if self.mode == "direct":
            return self.x_M - self.width * np.arctanh(np.sqrt(1 + u))
        return self._fL_y(np.log(-u))

    def _fL_y(self, y):
        # f_L written in y = log(-u); keeps full accuracy as u -> 0^-
        u = -np.exp(y)
        core = self.x_M - np.sqrt(1 + u) * np.polynomial.polynomial.polyval(u, self.P_coeffs)
        return core + self.beta * _switch((u - self.u_tail) / -self.u_tail) * y

    def fL_deriv(self, u: float, j: int) -> float:
        """j-th derivative of f_L at a single point u in (-1, 0)."""
        if j == 0:
            return float(self.fL(u))
        if self.mode == "direct":
            return float(_direct_derivs(j)(u)) * self.width
        val = -_sqrt_poly_deriv(self.P_coeffs, u, j)
        if u > self.u_tail:
            val += self.beta * _tail_deriv(u, self.u_tail, j)
        return val

    def fL_prime(self, u):
        """Vectorised f_L'."""
        u = np.asarray(u, dtype=float)
        if self.mode == "direct":
            return self.width / (2 * u * np.sqrt(1 + u))
        P = np.polynomial.polynomial.polyval(u, self.P_coeffs)
        dP = np.polynomial.polynomial.polyval(u, np.polynomial.polynomial.polyder(self.P_coeffs))
        r = np.sqrt(1 + u)
        out = -(P / (2 * r) + r * dP)
        v = (u - self.u_tail) / -self.u_tail
        with np.errstate(divide="ignore", invalid="ignore"):
            tail = self.beta * (_switch_prime(v) / -self.u_tail * np.log(-u) + _switch(v) / u)
        return out + np.where(v > 0, tail, 0.0)

    # --- u0 ---------------------------------------------------------------

    def decreasing_branch(self, x):
        """u0 on x <= x_M by inverting f_L (before tapering)."""
        x = np.asarray(x, dtype=float)
        if self.mode == "direct":
            return -1.0 / np.cosh((x - self.x_M) / self.width) ** 2
        lo = np.full(x.shape, _LOG_FLOOR)
        hi = np.zeros(x.shape)
        # f_L is increasing in y = log(-u)
        for _ in range(_BISECT_ITERS):
            mid = 0.5 * (lo + hi)
            above = self._fL_y(mid) > x
            hi = np.where(above, mid, hi)
            lo = np.where(above, lo, mid)
        return -np.exp(0.5 * (lo + hi))

    def _untapered(self, x):
        x = np.asarray(x, dtype=float)
        xr = np.where(x <= self.x_M, x, 2 * self.x_M - x)
        return self.decreasing_branch(xr)

    def window(self, x):
        a, b = self.taper
        d = np.abs(np.asarray(x, dtype=float)) / self.L
        return 1.0 - _switch((d - a) / (b - a))

    def u0(self, x):
        x = np.asarray(x, dtype=float)
        out = self._untapered(x) * self.window(x)
        return float(out) if out.ndim == 0 else out

    def u0_prime(self, x):
        """u0' on the untapered profile: 1 / f_L'(u0) on the decreasing branch."""
        x = np.asarray(x, dtype=float)
        left = x <= self.x_M
        xr = np.where(left, x, 2 * self.x_M - x)
        u = self.decreasing_branch(xr)
        with np.errstate(divide="ignore"):
            d = 1.0 / self.fL_prime(u)
        d = np.where(u < 0, d, 0.0)
        out = np.where(left, d, -d)
        return float(out) if out.ndim == 0 else out


# --- smooth switch ------------------------------------------------------------

def _bump(v):
    v = np.asarray(v, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(v > 0, np.exp(-1.0 / np.where(v > 0, v, 1.0)), 0.0)


def _switch(v):
    """C-infinity step: 0 for v <= 0, 1 for v >= 1."""
    a, b = _bump(v), _bump(1 - np.asarray(v, dtype=float))
    return a / (a + b)


def _switch_prime(v):
    v = np.clip(np.asarray(v, dtype=float), 0.0, 1.0)
    a, b = _bump(v), _bump(1 - v)
    with np.errstate(divide="ignore", invalid="ignore"):
        da = np.where(v > 0, a / np.where(v > 0, v, 1.0) ** 2, 0.0)
        db = np.where(v < 1, b / np.where(v < 1, 1 - v, 1.0) ** 2, 0.0)
        out = (da * b + a * db) / (a + b) ** 2
    return np.where((v > 0) & (v < 1), out, 0.0)


def _tail_deriv(u, u_tail, j):
    import mpmath

    def tail(x):
        v = (x - u_tail) / -u_tail
        if v <= 0:
            return mpmath.mpf(0)
        a = mpmath.exp(-1 / v)
        b = mpmath.exp(-1 / (1 - v)) if v < 1 else mpmath.mpf(0)
        return a / (a + b) * mpmath.log(-x)

    with mpmath.workdps(40):
        return float(mpmath.diff(tail, u, j))


# --- derivatives ------------------------------------------------------------

_U = sympy.Symbol("u")
_DIRECT_CACHE = {}


def _direct_derivs(j):
    """d^j/du^j of -artanh(sqrt(1+u)) as a float callable."""
    if j not in _DIRECT_CACHE:
        expr = sympy.diff(-sympy.atanh(sympy.sqrt(1 + _U)), _U, j)
        _DIRECT_CACHE[j] = sympy.lambdify(_U, sympy.simplify(expr), "math")
    return _DIRECT_CACHE[j]


def _sqrt_factor_deriv(u, i):
    """d^i/du^i sqrt(1+u)."""
    fall = 1.0
    for r in range(i):
        fall *= 0.5 - r
    return fall * (1 + u) ** (0.5 - i)


def _sqrt_poly_deriv(coeffs, u, j):
    """d^j/du^j [sqrt(1+u) P(u)] by the Leibniz rule."""
    total = 0.0
    dP = np.asarray(coeffs, dtype=float)
    for i in range(j + 1):
        # P^(j-i)
        pj = np.polynomial.polynomial.polyder(dP, j - i) if j - i else dP
        pv = np.polynomial.polynomial.polyval(u, pj) if len(pj) else 0.0
        total += math.comb(j, i) * _sqrt_factor_deriv(u, i) * pv
    return float(total)


# --- construction -------------------------------------------------------

DEFAULT_SLOPE = Fraction(-13, 10)      # f_L'(u_c) = -6 t_c
DEFAULT_TOP = Fraction(-100)           # f_L^(m+1)(u_c); negative so that k > 0


def solve_P(m: int, u_c: Fraction, slope: Fraction = DEFAULT_SLOPE,
            top: Fraction = DEFAULT_TOP) -> Tuple[float, ...]:
    """P of degree m with f_L'(u_c) = slope, f_L^(j)(u_c) = 0 (2 <= j <= m), f_L^(m+1)(u_c) = top.

    f_L = x_M - sqrt(u+1) P(u); the system is linear in P's coefficients and is
    solved exactly. Returned in powers of u, lowest first.
    """
    a = sympy.symbols(f"a0:{m + 1}")
    P = sum(a[i] * (_U - sympy.Rational(u_c)) ** i for i in range(m + 1))
    f = -sympy.sqrt(_U + 1) * P
    eqs = []
    for j in range(1, m + 2):
        dj = sympy.diff(f, _U, j).subs(_U, sympy.Rational(u_c))
        target = {1: sympy.Rational(slope), m + 1: sympy.Rational(top)}.get(j, 0)
        eqs.append(sympy.nsimplify(dj - target))
    A, rhs = sympy.linear_eq_to_matrix(eqs, a)
    # u_c = -1 puts the constraints on the sqrt branch point
    if not all(e.is_finite for e in A) or A.det() == 0:
        raise ConstraintSingular("derivative constraints on P are singular", m=m)
    coeffs = A.LUsolve(rhs)
    poly = sympy.Poly(sum(coeffs[i] * (_U - sympy.Rational(u_c)) ** i for i in range(m + 1)), _U)
    mono = poly.all_coeffs()[::-1]
    return tuple(float(sympy.N(c, 30)) for c in mono)


def check_monotone(spec: InitialDataSpec, n: int = 20001) -> float:
    """max f_L' on a grid of (-1, 0); raises MonotonicityLost if not negative."""
    y = np.linspace(-40, -1e-9, n)
    u = np.concatenate([-1 + np.geomspace(1e-12, 0.5, n), -np.exp(y)])
    fp = spec.fL_prime(u)
    worst = float(np.nanmax(fp))
    if not worst < 0:
        raise MonotonicityLost(f"f_L' reaches {worst:.3e} >= 0", max_fL_prime=worst)
    return worst


def build_initial_data(m: int, params: dict | None = None) -> InitialDataSpec:
    """Generic -sech^2 data for m = 2, constructed non-generic data for m >= 4."""
    params = dict(params or {})
    if m < 2 or m % 2:
        raise ConfigInvalid(f"m must be an even integer >= 2, got {m}")
    L = float(params.pop("L", 15.0))
    if m == 2 and params.get("mode", "direct") == "direct":
        spec = InitialDataSpec(mode="direct", x_M=float(params.get("x_M", 0.0)),
                               width=float(params.get("width", 1.0)), L=L, m_target=2)
        return spec
    u_c = Fraction(str(params.get("u_c", "-2/3")))
    slope = Fraction(str(params.get("slope", DEFAULT_SLOPE)))
    top = Fraction(str(params.get("top", DEFAULT_TOP)))
    P = solve_P(m, u_c, slope, top)
    spec = InitialDataSpec(mode="from_fL", x_M=float(params.get("x_M", 0.0)),
                           beta=float(params.get("beta", 0.5)), P_coeffs=P,
                           u_tail=float(params.get("u_tail", -0.4)), L=L,
                           u_c_target=float(u_c), m_target=m)
    if not spec.u_tail > float(u_c):
        raise ConfigInvalid("u_tail must lie between u_c and 0")
    if np.polynomial.polynomial.polyval(-1.0, P) <= 0:
        raise MonotonicityLost("P(-1) <= 0: the minimum would not be quadratic")
    check_monotone(spec)
    return spec
