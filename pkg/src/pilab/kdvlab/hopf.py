"""Characteristics of u_t + 6 u u_x = 0 and the point of gradient catastrophe."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from pilab.errors import DerivativeChainBroken, MaximizerNotUnique, MultivaluedRegion, NoBracket
from pilab.gfun import double_factorial
from pilab.kdvlab.initial import InitialDataSpec

CHAIN_TOL = 1e-8


@lru_cache(maxsize=32)
def _slope_peak(data: InitialDataSpec) -> Tuple[float, float]:
    """(xi*, max of -6 u0') over the decreasing branch, with a uniqueness check."""
    lo = data.x_M - data.taper[0] * data.L + abs(data.x_M)
    xi = np.linspace(lo, data.x_M, 20001)
    g = -6 * data.u0_prime(xi)
    i = int(np.argmax(g))
    # competing local maxima within 1e-6 of the peak value
    interior = (g[1:-1] >= g[:-2]) & (g[1:-1] >= g[2:])
    peaks = np.flatnonzero(interior) + 1
    rivals = [p for p in peaks if abs(xi[p] - xi[i]) > 20 * (xi[1] - xi[0])
              and g[p] > g[i] * (1 - 1e-6)]
    if rivals:
        raise MaximizerNotUnique(f"-6 u0' peaks at {len(rivals) + 1} separated points",
                                 xi=[float(xi[i])] + [float(xi[p]) for p in rivals])
    a, b = xi[max(i - 2, 0)], xi[min(i + 2, len(xi) - 1)]
    res = minimize_scalar(lambda x: 6 * data.u0_prime(x), bounds=(a, b), method="bounded",
                          options={"xatol": 1e-12})
    return float(res.x), float(max(-res.fun, g[i]))


def breaking_time(data: InitialDataSpec) -> float:
    return 1.0 / _slope_peak(data)[1]


def _characteristic_root(data: InitialDataSpec, x: float, t: float) -> float:
    g = lambda xi: xi + 6 * t * data.u0(xi) - x
    a, b = (x, x + 6 * t) if t >= 0 else (x + 6 * t, x)
    ga, gb = g(a), g(b)
    if ga == 0:
        return a
    if gb == 0:
        return b
    if ga * gb > 0:
        raise NoBracket(f"no sign change of the characteristic map on [{a}, {b}]", x=x, t=t)
    return brentq(g, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


def hopf_solve(data: InitialDataSpec, x: float, t: float) -> float:
    """u(x, t) from x = 6 t u0(xi) + xi, valid before the catastrophe."""
    if t >= breaking_time(data):
        raise MultivaluedRegion(f"t={t} is past the breaking time {breaking_time(data):.12g}", t=t)
    if t == 0:
        return float(data.u0(x))
    return float(data.u0(_characteristic_root(data, x, t)))


def hopf_field(data: InitialDataSpec, x, t: float, iters: int = 64) -> np.ndarray:
    """Vectorised hopf_solve by bisection on the characteristic map."""
    if t >= breaking_time(data):
        raise MultivaluedRegion(f"t={t} is past the breaking time", t=t)
    x = np.asarray(x, dtype=float)
    lo, hi = (x, x + 6 * t) if t >= 0 else (x + 6 * t, x)
    lo, hi = lo.copy(), hi.copy()
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        pos = mid + 6 * t * data.u0(mid) - x > 0
        hi = np.where(pos, mid, hi)
        lo = np.where(pos, lo, mid)
    return data.u0(0.5 * (lo + hi))


@dataclass(frozen=True)
class CriticalPoint:
    x_c: float
    t_c: float
    u_c: float
    m: int
    k: float
    fL_derivs: Tuple[float, ...]      # f_L^(j)(u_c), j = 2..m+1
    t_c_system: float = field(default=float("nan"), compare=False)   # -f_L'(u_c) / 6

    def residuals(self, data: InitialDataSpec) -> Tuple[float, float, float]:
        """F, F', F'' at (u_c; x_c, t_c) with F = -x + 6 u t + f_L(u)."""
        F = -self.x_c + 6 * self.u_c * self.t_c + data.fL_deriv(self.u_c, 0)
        F1 = 6 * self.t_c + data.fL_deriv(self.u_c, 1)
        F2 = data.fL_deriv(self.u_c, 2)
        return F, F1, F2


def k_constant(m: int, top_derivative: float) -> float:
    """(-(2^(m-1) / (2m+1)!!) f_L^(m+1)(u_c))^(2/(2m+3))."""
    base = -(2 ** (m - 1) / double_factorial(2 * m + 1)) * top_derivative
    if not base > 0:
        raise DerivativeChainBroken(f"f_L^({m + 1})(u_c) = {top_derivative:.6g} gives k^(..) <= 0",
                                    m=m)
    return base ** (2.0 / (2 * m + 3))


def critical_point(data: InitialDataSpec, m: int, tol: float = CHAIN_TOL) -> CriticalPoint:
    xi_star, peak = _slope_peak(data)
    t_c = 1.0 / peak
    u_star = float(data.decreasing_branch(xi_star))
    # u_c is the simple root of f_L^(m) nearest the slope maximiser
    fm = lambda u: data.fL_deriv(u, m)
    width = 0.05
    a, b = max(u_star - width, -1 + 1e-9), min(u_star + width, -1e-9)
    ua = np.linspace(a, b, 201)
    vals = np.array([fm(u) for u in ua])
    sgn = np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)
    if len(sgn) == 0:
        raise DerivativeChainBroken(f"f_L^({m}) has no root near u = {u_star:.6g}", m=m)
    j = sgn[np.argmin(np.abs(ua[sgn] - u_star))]
    u_c = brentq(fm, ua[j], ua[j + 1], xtol=1e-15) if vals[j] != 0 else float(ua[j])
    derivs = tuple(data.fL_deriv(u_c, j) for j in range(2, m + 2))
    for j, d in zip(range(2, m + 1), derivs):
        if abs(d) >= tol:
            raise DerivativeChainBroken(f"f_L^({j})(u_c) = {d:.3e} does not vanish", j=j, value=d)
    if abs(derivs[-1]) < tol:
        raise DerivativeChainBroken(f"f_L^({m + 1})(u_c) vanishes: degenerate beyond order {m}",
                                    j=m + 1)
    x_c = 6 * u_c * t_c + data.fL_deriv(u_c, 0)
    return CriticalPoint(x_c=float(x_c), t_c=float(t_c), u_c=float(u_c), m=m,
                         k=k_constant(m, derivs[-1]), fL_derivs=derivs,
                         t_c_system=-data.fL_deriv(u_c, 1) / 6)


def scaling_map(cp: CriticalPoint, x, t, eps: float):
    """Physical (x, t) to the arguments (s, t_1) of the P_I^m solution."""
    m = cp.m
    tau0 = (np.asarray(x) - cp.x_c - 6 * cp.u_c * (np.asarray(t) - cp.t_c)) / math.sqrt(cp.k)
    tau1 = -3 * (np.asarray(t) - cp.t_c) / cp.k ** 1.5
    return (eps ** (-(2 * m + 2) / (2 * m + 3)) * tau0,
            eps ** (-2 * m / (2 * m + 3)) * tau1)


def inverse_scaling_map(cp: CriticalPoint, s, t1, eps: float):
    """(s, t_1) back to physical (x, t)."""
    m = cp.m
    tau0 = np.asarray(s) * eps ** ((2 * m + 2) / (2 * m + 3))
    tau1 = np.asarray(t1) * eps ** (2 * m / (2 * m + 3))
    t = cp.t_c - tau1 * cp.k ** 1.5 / 3
    x = cp.x_c + 6 * cp.u_c * (t - cp.t_c) + math.sqrt(cp.k) * tau0
    return x, t
