"""Pole-free solutions of P_I^m on a truncated interval by damped Newton.

The unknown is q on a uniform grid of [-S, S]. Interior rows evaluate the
canonical equation on the finite-difference jet of q; m rows at each end pin
q and its first m-1 derivatives to the leading-order profile.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.interpolate import make_interp_spline
from numpy.polynomial import chebyshev as C

from pilab.diffpoly import generate_equation
from pilab.diffpoly.ring import Q, DiffPoly
from pilab.errors import ConfigInvalid, JacobianSingular, NewtonDiverged, OddOrderRequested
from pilab.gfun import asymptotic_constant
from pilab.painleve.stencils import banded_stencil

log = logging.getLogger(__name__)


# Residual noise of the long-double iterate, fitted as C h^(-2m) on m = 2, 4
# and stencil orders 6-10; e.g. about 8e-8 at m = 4, h = 0.05.
ROUNDING_CONSTANT = 3e-18


def rounding_floor(m: int, h: float) -> float:
    return ROUNDING_CONSTANT * h ** (-2 * m)


@dataclass(frozen=True)
class BvpConfig:
    m: int
    t: Tuple[float, ...] = ()
    S: float = 40.0
    N: int = 2000
    stencil_order: int = 6
    newton_tol: float | None = None        # None: max(1e-8, 10x the rounding floor)
    max_iters: int = 60
    min_step: float = 1.0 / 1024
    armijo: float = 1e-4
    continuation: bool = True
    S0: float = 10.0
    S_factor: float = 1.6

    def __post_init__(self):
        object.__setattr__(self, "t", tuple(float(x) for x in self.t) or (0.0,) * max(self.m - 1, 0))

    @property
    def h(self) -> float:
        return 2 * self.S / (self.N - 1)

    @property
    def tol(self) -> float:
        if self.newton_tol is not None:
            return self.newton_tol
        return max(1e-8, 10 * rounding_floor(self.m, self.h))

    def validate(self) -> "BvpConfig":
        if self.m % 2 or self.m < 2:
            if self.m % 2:
                raise OddOrderRequested(f"m={self.m}: real pole-free solutions exist only for even m",
                                        m=self.m)
            raise ConfigInvalid(f"m must be an even integer >= 2, got {self.m}")
        if len(self.t) != self.m - 1:
            raise ConfigInvalid(f"expected {self.m - 1} time values, got {len(self.t)}")
        if not self.S > 0:
            raise ConfigInvalid("S must be positive")
        if self.N < 8 * self.m:
            raise ConfigInvalid(f"N={self.N} below the minimum 8m={8 * self.m}")
        if self.stencil_order < 4 or self.stencil_order % 2:
            raise ConfigInvalid("stencil_order must be an even integer >= 4")
        if (self.newton_tol is not None and not self.newton_tol > 0) or self.max_iters < 1:
            raise ConfigInvalid("newton_tol must be positive and max_iters >= 1")
        return self


@dataclass(frozen=True)
class GridSolution:
    m: int
    t: Tuple[float, ...]
    s_grid: np.ndarray
    q_values: np.ndarray
    residual_sup: float
    newton_iters: int
    converged: bool
    stencil_order: int = 6
    # long-double copy of the iterate; keeps high-order jets above the rounding floor
    q_extended: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def S(self) -> float:
        return float(self.s_grid[-1])

    @property
    def N(self) -> int:
        return len(self.s_grid)

    def jet(self, nder: int) -> np.ndarray:
        """Rows 0..nder: finite-difference derivatives of q on the grid."""
        h = 2 * np.longdouble(self.S) / (self.N - 1)
        qv = self.q_extended if self.q_extended is not None else self.q_values
        return np.array([banded_stencil(self.N, h, d, self.stencil_order).apply(qv)
                         for d in range(nder + 1)], dtype=float)


# --- the equation as numeric callables -------------------------------------

@lru_cache(maxsize=None)
def _compiled_equation(m: int):
    eq = generate_equation(m).canonical
    f = eq.compile()
    partials = [eq.partial((Q, j)).compile() for j in range(2 * m + 1)]
    return f, partials


@lru_cache(maxsize=None)
def algebraic_part(m: int) -> Tuple[Tuple[float, ...], ...]:
    """Coefficients of the derivative-free balance s + sum_k a_k(t) q^k.

    Returned as a tuple over q-powers 0..m+1 of tuples over (1, t_1, ..., t_{m-1}).
    """
    eq = generate_equation(m).canonical
    coeffs = [[0.0] * m for _ in range(m + 2)]
    for mono, c in eq.items():
        d = dict(mono)
        if any(v[0] == Q and v[1] > 0 for v in d):
            continue
        if (1, 0) in d:
            continue
        k = d.get((Q, 0), 0)
        tvars = [v for v in d if v[0] == 2]
        slot = tvars[0][1] if tvars else 0
        coeffs[k][slot] += float(c)
    return tuple(tuple(r) for r in coeffs)


def _balance_poly(m: int, t: Sequence[float]) -> np.ndarray:
    """Polynomial in q (lowest degree first) without the s term."""
    tv = np.concatenate([[1.0], np.asarray(t, dtype=float)])
    return np.array([np.dot(r, tv) for r in algebraic_part(m)])


def dispersionless_root(m: int, t: Sequence[float], s: float) -> float:
    """Real root of s + sum_k a_k(t) q^k = 0 nearest to c |s|^(1/(m+1)).

    For t = 0 this is exactly c |s|^(1/(m+1)).
    """
    if not any(t):
        return asymptotic_constant(m, 1 if s >= 0 else -1) * abs(s) ** (1.0 / (m + 1))
    coef = _balance_poly(m, t).copy()
    coef[0] += s
    roots = np.roots(coef[::-1])
    real = roots[np.abs(roots.imag) <= 1e-9 * (1 + np.abs(roots.real))].real
    target = asymptotic_constant(m, 1 if s >= 0 else -1) * abs(s) ** (1.0 / (m + 1))
    return float(real[np.argmin(np.abs(real - target))])


def boundary_profile(m: int, t: Sequence[float], s_end: float, nder: int) -> np.ndarray:
    """Values and derivatives 0..nder of the leading-order profile at ``s_end``."""
    if not any(t):
        alpha = 1.0 / (m + 1)
        sgn = 1.0 if s_end >= 0 else -1.0
        c = asymptotic_constant(m, int(sgn))
        out, fall = [], 1.0
        for j in range(nder + 1):
            out.append(c * fall * abs(s_end) ** (alpha - j) * sgn ** j)
            fall *= alpha - j
        return np.array(out)
    # smooth branch of the algebraic balance: Chebyshev fit and differentiate
    half = min(1.0, 0.25 * abs(s_end))
    nodes = C.chebpts2(32)
    svals = s_end + half * nodes
    qvals = np.array([dispersionless_root(m, t, x) for x in svals])
    ser = C.Chebyshev.fit(nodes, qvals, 31)
    return np.array([ser.deriv(j)(0.0) / half ** j if j else ser(0.0) for j in range(nder + 1)])


GUESS_CORE = 1.5


def leading_order_guess(m: int, t: Sequence[float], s_grid) -> np.ndarray:
    """c |s|^(1/(m+1)) sgn(s), regularised analytically at the origin.

    The guess is c s (s^4 + w^4)^((alpha-1)/4) with w = GUESS_CORE: linear
    near 0, within 3e-4 of the power law for |s| >= 8. Piecewise joins are
    avoided because any kink turns into an h^(-2m) residual spike that stalls
    the line search for m >= 4.
    """
    s_grid = np.asarray(s_grid, dtype=float)
    alpha = 1.0 / (m + 1)
    c = asymptotic_constant(m, 1)
    return c * s_grid * (s_grid ** 4 + GUESS_CORE ** 4) ** ((alpha - 1) / 4)


# --- Newton machinery -------------------------------------------------

class _System:
    def __init__(self, cfg: BvpConfig):
        self.cfg = cfg
        m, n = cfg.m, cfg.N
        self.s = np.linspace(-cfg.S, cfg.S, n)
        h = 2 * np.longdouble(cfg.S) / (n - 1)
        self.B = [banded_stencil(n, h, d, cfg.stencil_order) for d in range(2 * m + 1)]
        self.D = [b.matrix() for b in self.B]
        self.f, self.partials = _compiled_equation(m)
        self.left = boundary_profile(m, cfg.t, -cfg.S, m - 1)
        self.right = boundary_profile(m, cfg.t, cfg.S, m - 1)
        self.interior = np.arange(m, n - m)
        self.bc_rhs = np.concatenate([self.left, self.right])

    def jet(self, qv):
        return np.array([b.apply(qv) for b in self.B], dtype=float)

    def _bc(self, qv):
        # boundary rows in long double as well; the values sit at O(1)
        n, m = self.cfg.N, self.cfg.m
        out = [self.B[j].weights[0] @ qv[self.B[j].lo[0]:self.B[j].lo[0] + self.B[j].weights.shape[1]]
               for j in range(m)]
        out += [self.B[j].weights[n - 1] @ qv[self.B[j].lo[n - 1]:self.B[j].lo[n - 1] + self.B[j].weights.shape[1]]
                for j in range(m)]
        return np.array(out, dtype=float) - self.bc_rhs

    def residual(self, qv):
        m, n = self.cfg.m, self.cfg.N
        jet = self.jet(qv)
        r = np.empty(n)
        body = self.f(jet, self.s, self.cfg.t)
        r[m:n - m] = body[m:n - m]
        bcv = self._bc(qv)
        r[:m] = bcv[:m]
        r[n - m:] = bcv[m:]
        return r

    def jacobian(self, qv):
        m, n = self.cfg.m, self.cfg.N
        jet = self.jet(qv)
        J = None
        for d, dpart in enumerate(self.partials):
            coef = dpart(jet, self.s, self.cfg.t)
            if not np.any(coef):
                continue
            term = sp.diags(coef) @ self.D[d]
            J = term if J is None else J + term
        J = J.tolil()
        for j in range(m):
            J[j, :] = self.D[j][0]
            J[n - m + j, :] = self.D[j][n - 1]
        return J.tocsc()


def _newton(system: _System, q0: np.ndarray) -> Tuple[np.ndarray, float, int]:
    cfg = system.cfg
    qv = np.asarray(q0, dtype=np.longdouble).copy()
    r = system.residual(qv)
    norm = float(np.abs(r).max())
    for it in range(1, cfg.max_iters + 1):
        if norm < cfg.tol:
            return qv, norm, it - 1
        J = system.jacobian(qv)
        try:
            lu = spla.splu(J)
            dq = lu.solve(-r)
        except RuntimeError as exc:
            raise JacobianSingular(f"singular Jacobian at iteration {it}: {exc}",
                                   iteration=it) from None
        if not np.all(np.isfinite(dq)):
            raise JacobianSingular(f"non-finite Newton step at iteration {it}", iteration=it)
        merit = float(r @ r)
        lam = 1.0
        while True:
            trial = qv + lam * dq
            rt = system.residual(trial)
            mt = float(rt @ rt)
            if np.isfinite(mt) and mt <= (1 - 2 * cfg.armijo * lam) * merit:
                break
            lam /= 2
            if lam < cfg.min_step:
                break
        if lam < cfg.min_step:
            # accept a full step once the merit stalls at the rounding floor
            if norm < 1e3 * cfg.tol:
                trial, rt = qv + dq, system.residual(qv + dq)
                if float(np.abs(rt).max()) < cfg.tol:
                    return trial, float(np.abs(rt).max()), it
            raise NewtonDiverged(
                f"line search failed at iteration {it}, residual {norm:.3e}",
                residual=norm, iterate_norm=float(np.abs(qv).max()), iteration=it)
        qv, r = trial, rt
        norm = float(np.abs(r).max())
        log.debug("newton it=%d lam=%.3g res=%.3e", it, lam, norm)
    if norm < cfg.tol:
        return qv, norm, cfg.max_iters
    raise NewtonDiverged(f"no convergence in {cfg.max_iters} iterations, residual {norm:.3e}",
                         residual=norm, iterate_norm=float(np.abs(qv).max()),
                         iteration=cfg.max_iters)


def assemble_system(cfg: BvpConfig) -> Tuple[Callable, Callable]:
    """Residual and Jacobian evaluators for the discretised problem."""
    system = _System(cfg.validate())
    return system.residual, system.jacobian


def _outer_profile(cfg: BvpConfig, s_vals) -> np.ndarray:
    if any(cfg.t):
        return np.array([dispersionless_root(cfg.m, cfg.t, x) for x in s_vals])
    return leading_order_guess(cfg.m, cfg.t, s_vals)


def _smooth_step(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1."""
    x = np.clip(x, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
        b = np.where(x < 1, np.exp(-1.0 / np.where(x < 1, 1.0 - x, 1.0)), 0.0)
    return a / (a + b)


EXTEND_TAPER = 0.3      # fraction of the old half-width over which the correction fades


def _extend(sol_s, sol_q, cfg: BvpConfig, s_new) -> np.ndarray:
    """Outer profile plus the old solution's correction, faded out smoothly.

    A hard switch between the two leaves jumps in high derivatives at the old
    boundary, which an order-2m stencil turns into an h^(-2m) residual spike.
    """
    outer = _outer_profile(cfg, s_new)
    corr = make_interp_spline(sol_s, np.asarray(sol_q, dtype=float) - _outer_profile(cfg, sol_s),
                              k=7)
    S_old = float(sol_s[-1])
    fade = 1.0 - _smooth_step((np.abs(s_new) - (1 - EXTEND_TAPER) * S_old) / (EXTEND_TAPER * S_old))
    inside = np.abs(s_new) <= S_old
    out = outer.copy()
    out[inside] += fade[inside] * corr(s_new[inside])
    return out


def _solve_fixed(cfg: BvpConfig, guess: np.ndarray) -> GridSolution:
    system = _System(cfg)
    qv, res, iters = _newton(system, guess)
    if not np.all(np.isfinite(qv)):
        raise NewtonDiverged("non-finite iterate", residual=res)
    return GridSolution(cfg.m, cfg.t, system.s, qv.astype(float), res, iters, True,
                        cfg.stencil_order, q_extended=qv)


def _solve_t0(cfg: BvpConfig) -> GridSolution:
    """Solution at t = 0, with domain continuation S0 -> S at fixed spacing."""
    cfg = replace(cfg, t=(0.0,) * (cfg.m - 1))
    if not cfg.continuation or cfg.S <= cfg.S0:
        return _solve_fixed(cfg, leading_order_guess(cfg.m, cfg.t, np.linspace(-cfg.S, cfg.S, cfg.N)))
    stages = [cfg.S0]
    while stages[-1] * cfg.S_factor < cfg.S:
        stages.append(stages[-1] * cfg.S_factor)
    sol, iters = None, 0
    for Si in stages:
        Ni = max(8 * cfg.m, int(round(2 * Si / cfg.h)) + 1)
        sub = replace(cfg, S=Si, N=Ni)
        s_new = np.linspace(-Si, Si, Ni)
        guess = leading_order_guess(cfg.m, cfg.t, s_new) if sol is None \
            else _extend(sol.s_grid, sol.q_values, sub, s_new)
        sol = _solve_fixed(sub, guess)
        iters += sol.newton_iters
    s_new = np.linspace(-cfg.S, cfg.S, cfg.N)
    final = _solve_fixed(cfg, _extend(sol.s_grid, sol.q_values, cfg, s_new))
    return replace(final, newton_iters=final.newton_iters + iters)


def continue_in_t(start: GridSolution, cfg: BvpConfig, max_halvings: int = 10) -> GridSolution:
    """Straight-line homotopy in t from ``start`` (on cfg's grid) to cfg.t.

    Secant predictor from the last two accepted points; the step doubles after
    cheap corrections and halves on failure.
    """
    t0 = np.asarray(start.t, dtype=float)
    t1 = np.asarray(cfg.t, dtype=float)
    if np.allclose(t0, t1):
        return start
    ext = lambda g: g.q_extended if g.q_extended is not None else g.q_values
    lam, step, sol, iters = 0.0, 1.0, start, start.newton_iters
    prev = None            # (lam, q) of the point before ``sol``
    halvings = 0
    while lam < 1.0:
        nxt = min(1.0, lam + step)
        sub = replace(cfg, t=tuple(t0 + nxt * (t1 - t0)))
        guess = ext(sol)
        if prev is not None:
            guess = guess + (ext(sol) - prev[1]) * ((nxt - lam) / (lam - prev[0]))
        try:
            new = _solve_fixed(sub, guess)
        except (NewtonDiverged, JacobianSingular):
            halvings += 1
            if halvings > max_halvings:
                raise
            step /= 2
            continue
        iters += new.newton_iters
        prev = (lam, ext(sol))
        sol, lam = new, nxt
        if new.newton_iters <= 6:
            step = min(2 * step, 1.0)
    return replace(sol, t=cfg.t, newton_iters=iters)


def solve_pole_free(cfg: BvpConfig) -> GridSolution:
    """Damped Newton from the leading-order guess; continuation in S, then t."""
    cfg.validate()
    base = _solve_t0(cfg)
    if not any(cfg.t):
        return base
    return continue_in_t(base, cfg)


def serpentine(points_per_axis: Sequence[float], dim: int):
    """Grid points ordered so consecutive points differ in one coordinate."""
    axis = list(points_per_axis)
    if dim == 0:
        yield ()
        return
    for i, head in enumerate(serpentine(axis, dim - 1)):
        for x in (axis if i % 2 == 0 else axis[::-1]):
            yield head + (x,)


def sweep_pole_free(cfg: BvpConfig, axis: Sequence[float]) -> dict:
    """Solve on the tensor grid axis^(m-1), continuing from neighbour to neighbour.

    Returns {t: GridSolution}. Any failure propagates: a missing point is never
    papered over with a different branch.
    """
    cfg.validate()
    sol = _solve_t0(cfg)
    out = {}
    for tv in serpentine(axis, cfg.m - 1):
        sol = continue_in_t(sol, replace(cfg, t=tv))
        out[tuple(float(x) for x in tv)] = sol
    return out
