"""Post-processing of grid solutions: interpolation, tail fits, KdV flows."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.interpolate import make_interp_spline

from pilab.diffpoly import generate_kdv_flow
from pilab.errors import OutOfDomain, WindowTooSmall
from pilab.gfun import asymptotic_constant
from pilab.painleve.bvp import BvpConfig, GridSolution, continue_in_t, solve_pole_free

_SPLINE_DEGREE = 7


def _spline(sol: GridSolution):
    spl = getattr(sol, "_spline_cache", None)
    if spl is None:
        spl = make_interp_spline(sol.s_grid, sol.q_values, k=_SPLINE_DEGREE)
        object.__setattr__(sol, "_spline_cache", spl)
    return spl


def sample(sol: GridSolution, s):
    """Degree-7 spline interpolant of q; exact at grid nodes."""
    s_arr = np.asarray(s, dtype=float)
    if np.any(np.abs(s_arr) > sol.S * (1 + 1e-12)):
        raise OutOfDomain(f"sample outside [-{sol.S}, {sol.S}]", S=sol.S)
    out = np.asarray(_spline(sol)(s_arr))
    # grid nodes return the stored values bit for bit
    idx = np.clip(np.searchsorted(sol.s_grid, s_arr), 0, sol.N - 1)
    hit = sol.s_grid[idx] == s_arr
    out = np.where(hit, sol.q_values[idx], out)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class AsymptoticFit:
    exponent: float        # slope of log|q - c s^(1/(m+1))| against log s
    c_fit: float           # q / s^(1/(m+1)) at the outer end of the window
    c_asym: float
    window: tuple
    n_points: int


def verify_asymptotics(sol: GridSolution, side: int = 1) -> AsymptoticFit:
    """Log-log fit of |q - c_asym |s|^(1/(m+1))| over |s| in [S/2, 0.9 S]."""
    S = sol.S
    alpha = 1.0 / (sol.m + 1)
    a = np.abs(sol.s_grid)
    mask = (a >= S / 2) & (a <= 0.9 * S) & (np.sign(sol.s_grid) == side)
    if mask.sum() < 20:
        raise WindowTooSmall(f"fit window holds {int(mask.sum())} nodes, need 20", n=int(mask.sum()))
    c = asymptotic_constant(sol.m, side)
    sv, qv = a[mask], sol.q_values[mask]
    dev = np.abs(qv - c * sv ** alpha)
    good = dev > 0
    slope, _ = np.polyfit(np.log(sv[good]), np.log(dev[good]), 1)
    c_fit = float(side * np.median(np.abs(qv) / sv ** alpha))
    return AsymptoticFit(float(slope), c_fit, c, (float(S / 2), float(0.9 * S)), int(mask.sum()))


@dataclass(frozen=True)
class FlowCheck:
    k: int
    delta: float
    residual: float
    window: float


def flow_residual(cfg: BvpConfig, k: int, delta: float, base: GridSolution | None = None,
                  window_frac: float = 0.5) -> FlowCheck:
    """sup |(q(t_k+d) - q(t_k-d)) / 2d + (1/(2k+1)) D L_k(q)| over |s| <= window_frac * S."""
    if not 1 <= k <= cfg.m - 1:
        raise ValueError(f"k must be in 1..{cfg.m - 1}")
    base = base if base is not None else solve_pole_free(cfg)
    tp, tm = list(cfg.t), list(cfg.t)
    tp[k - 1] += delta
    tm[k - 1] -= delta
    qp = continue_in_t(base, replace(cfg, t=tuple(tp)))
    qm = continue_in_t(base, replace(cfg, t=tuple(tm)))
    dq_dt = (qp.q_values - qm.q_values) / (2 * delta)
    flow = generate_kdv_flow(k)
    jet = base.jet(2 * k + 1)
    rhs = flow.rhs.compile()(jet, base.s_grid, base.t)
    win = np.abs(base.s_grid) <= window_frac * base.S
    res = float(np.abs(dq_dt - rhs)[win].max())
    return FlowCheck(k, delta, res, window_frac * base.S)


def verify_time_flow(cfg: BvpConfig, k: int, delta: float) -> float:
    return flow_residual(cfg, k, delta).residual
