"""KdV near the catastrophe against u_c - (2/k) eps^(2/(2m+3)) q(s, t_1, 0, ..., 0)."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Dict, List, Sequence, Tuple

import numpy as np

from pilab.errors import WindowOutsideSolutionDomain
from pilab.kdvlab.evolve import kdv_evolve_many
from pilab.kdvlab.hopf import CriticalPoint, critical_point, inverse_scaling_map
from pilab.kdvlab.initial import InitialDataSpec
from pilab.painleve import BvpConfig, GridSolution, continue_in_t, sample, solve_pole_free

log = logging.getLogger(__name__)

# (s, t_1) rectangle, in the variables of the P_I^m solution
DEFAULT_WINDOW = ((-2.0, 2.0), (-1.0, 1.0))


@dataclass
class ComparisonReport:
    m: int
    eps: List[float]
    err: List[float]
    rate: float
    rate_expected: float
    window: Tuple[Tuple[float, float], Tuple[float, float]]
    cp: CriticalPoint
    leading_ratio: List[float]          # sup|u - u_c| / ((2/k) eps^(2/(2m+3))) per eps
    sup_q: float                        # sup |q| over the window
    kdv_N: int = 0
    tail_ratio: List[float] = field(default_factory=list)

    def to_record(self) -> dict:
        return {
            "m": self.m, "eps": list(self.eps), "err": list(self.err),
            "rate": self.rate, "rate_expected": self.rate_expected,
            "window": [list(w) for w in self.window],
            "cp": {"x_c": self.cp.x_c, "t_c": self.cp.t_c, "u_c": self.cp.u_c, "k": self.cp.k},
            "leading_ratio": list(self.leading_ratio), "sup_q": self.sup_q,
            "kdv_N": self.kdv_N, "tail_ratio": list(self.tail_ratio),
        }


def painleve_slices(m: int, t1_values: Sequence[float], S: float = 30.0, h: float = 0.05,
                    stencil_order: int = 10, newton_tol: float | None = None) -> Dict[float, GridSolution]:
    """q(., t_1, 0, ..., 0) for each t_1, by continuation from t = 0."""
    N = int(round(2 * S / h)) + 1
    tol = newton_tol
    cfg = BvpConfig(m=m, S=S, N=N, stencil_order=stencil_order, newton_tol=tol)
    base = solve_pole_free(cfg)
    out, sol = {}, base
    for t1 in sorted(t1_values, key=abs):
        start = sol if np.sign(sol.t[0]) * np.sign(t1) >= 0 else base
        tv = (float(t1),) + (0.0,) * (m - 2)
        sol = continue_in_t(start, BvpConfig(m=m, t=tv, S=S, N=N, stencil_order=stencil_order,
                                             newton_tol=tol))
        out[float(t1)] = sol
    return out


def fit_rate(eps: Sequence[float], err: Sequence[float]) -> float:
    slope, _ = np.polyfit(np.log(np.asarray(eps)), np.log(np.asarray(err)), 1)
    return float(slope)


def _eps_error(data, cp, s_pts, t1_pts, q_tab, N, eps):
    """(sup error, sup|u - u_c| / leading scale, worst spectral tail) at one eps."""
    m = cp.m
    alpha = 2.0 / (2 * m + 3)
    pts = []
    for t1 in t1_pts:
        x, t = inverse_scaling_map(cp, s_pts, t1, eps)
        if t < 0 or np.abs(x).max() > data.taper[0] * data.L:
            raise WindowOutsideSolutionDomain(
                f"mapped window leaves the KdV domain at eps={eps}", eps=eps, t1=float(t1))
        pts.append((float(t), float(t1), np.asarray(x)))
    pts.sort(key=lambda p: p[0])
    fields = kdv_evolve_many(data, eps, [p[0] for p in pts], N=N)
    err, lead = 0.0, 0.0
    for (t, t1, x), fld in zip(pts, fields):
        u_num = fld.at(x)
        u_pred = cp.u_c - (2 / cp.k) * eps ** alpha * q_tab[t1]
        err = max(err, float(np.abs(u_num - u_pred).max()))
        lead = max(lead, float(np.abs(u_num - cp.u_c).max()))
    log.info("eps=%g err=%.4e", eps, err)
    return err, lead / ((2 / cp.k) * eps ** alpha), max(f.tail_ratio for f in fields)


def compare_double_scaling(data: InitialDataSpec, m: int, eps_list: Sequence[float],
                           window=DEFAULT_WINDOW, n_s: int = 41, n_t: int = 5, N: int = 16384,
                           slices: Dict[float, GridSolution] | None = None,
                           cp: CriticalPoint | None = None, jobs: int = 1) -> ComparisonReport:
    """Sup-window error of the double-scaling prediction and its fitted eps-rate."""
    (s_lo, s_hi), (t1_lo, t1_hi) = window
    cp = cp if cp is not None else critical_point(data, m)
    s_pts = np.linspace(s_lo, s_hi, n_s)
    t1_pts = np.linspace(t1_lo, t1_hi, n_t)
    if slices is None:
        slices = painleve_slices(m, t1_pts)
    for t1 in t1_pts:
        sol = slices.get(float(t1))
        if sol is None or max(abs(s_lo), abs(s_hi)) > sol.S:
            raise WindowOutsideSolutionDomain(
                f"window s in [{s_lo}, {s_hi}], t1={t1} not covered by the P_I^{m} solutions",
                t1=float(t1))
    q_tab = {float(t1): np.asarray(sample(slices[float(t1)], s_pts)) for t1 in t1_pts}
    sup_q = max(float(np.abs(v).max()) for v in q_tab.values())

    job = partial(_eps_error, data, cp, s_pts, t1_pts, q_tab, N)
    if jobs > 1 and len(eps_list) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(eps_list))) as pool:
            rows = list(pool.map(job, eps_list))
    else:
        rows = [job(eps) for eps in eps_list]
    errs = [r[0] for r in rows]
    leads = [r[1] for r in rows]
    tails = [r[2] for r in rows]
    rate = fit_rate(eps_list, errs) if len(eps_list) > 1 else float("nan")
    return ComparisonReport(m=m, eps=[float(e) for e in eps_list], err=errs, rate=rate,
                            rate_expected=4.0 / (2 * m + 3),
                            window=((float(s_lo), float(s_hi)), (float(t1_lo), float(t1_hi))),
                            cp=cp, leading_ratio=leads, sup_q=sup_q, kdv_N=N, tail_ratio=tails)
