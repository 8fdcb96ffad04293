"""Acceptance criteria A1-A10 as runnable checks.

Each check returns a :class:`Criterion` with the measured quantities, so the
same code backs ``pilab verify`` and the pytest acceptance suite.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List

import numpy as np


@dataclass
class Criterion:
    name: str
    passed: bool
    summary: str
    seconds: float = 0.0
    budget: float | None = None
    details: Dict[str, object] = field(default_factory=dict)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{self.name} {tag} ({self.seconds:.1f}s) {self.summary}"

    def to_record(self) -> dict:
        return {"name": self.name, "passed": self.passed, "summary": self.summary,
                "seconds": self.seconds, "budget": self.budget, "details": self.details}


def _timed(name: str, budget: float | None, fn: Callable[[], tuple]) -> Criterion:
    t0 = time.perf_counter()
    ok, summary, details = fn()
    dt = time.perf_counter() - t0
    if budget is not None and dt > budget:
        ok = False
        summary += f"; runtime {dt:.1f}s over the {budget:.0f}s budget"
    return Criterion(name, bool(ok), summary, dt, budget, details)


# --- A1 ---------------------------------------------------------------------

def a1_fixtures() -> Criterion:
    from pilab.diffpoly import generate_equation
    from pilab.diffpoly.fixtures import FIXTURE_ORDERS, load_fixture

    def run():
        bad = [m for m in FIXTURE_ORDERS
               if generate_equation(m, allow_odd=True).paper_normalized != load_fixture(m)]
        return not bad, f"normalised m=0..4 equations equal fixtures; mismatches: {bad or 'none'}", \
            {"mismatches": bad}
    return _timed("A1", 1.0, run)


# --- A2 ---------------------------------------------------------------------

def a2_recursion_and_lax() -> Criterion:
    from pilab.diffpoly import apply_lenard_operator, lenard, total_derivative, verify_lax_identities

    def run():
        rec = [k for k in range(0, 8)
               if total_derivative(lenard(k + 1)) != apply_lenard_operator(lenard(k))]
        lax = {m: verify_lax_identities(m).passed for m in (2, 4, 6)}
        ok = not rec and all(lax.values())
        return ok, f"recursion failures k<=7: {rec or 'none'}; Lax m=2,4,6: {lax}", \
            {"recursion_failures": rec, "lax": {str(k): v for k, v in lax.items()}}
    return _timed("A2", 30.0, run)


# --- A3 ---------------------------------------------------------------------

def a3_pi2_crosscheck() -> Criterion:
    from pilab.gfun import pi2_crosscheck

    def run():
        d = pi2_crosscheck()
        return d < 1e-12, f"|60^(2/7) c 60^(1/21) - 6^(1/3)| = {d:.3e} (< 1e-12)", {"delta": d}
    return _timed("A3", None, run)


# --- A4 ---------------------------------------------------------------------

def a4_positivity() -> Criterion:
    from pilab.gfun import make_gfunction, verify_positivity

    def run():
        reps = {m: verify_positivity(make_gfunction(m, 1), span=1e4) for m in range(2, 13, 2)}
        roots = {m: r.real_root_count for m, r in reps.items()}
        gmin = {m: min(r.g_min.values()) for m, r in reps.items()}
        ok = all(r.passed for r in reps.values())
        return ok, f"Sturm real-root counts {roots}; min sampled g {min(gmin.values()):.3e}", \
            {"roots": {str(k): v for k, v in roots.items()}, "g_min": {str(k): v for k, v in gmin.items()}}
    return _timed("A4", 10.0, run)


# --- A5 / A6 ----------------------------------------------------------------

M4_CONFIG = dict(N=2401, stencil_order=10, newton_tol=5e-7)


def a5_m2_solution() -> Criterion:
    from pilab.painleve import BvpConfig, sample, solve_pole_free, verify_asymptotics

    def run():
        base = solve_pole_free(BvpConfig(m=2, S=40, N=2000))
        fine = solve_pole_free(BvpConfig(m=2, S=40, N=4000))
        wide = solve_pole_free(BvpConfig(m=2, S=60, N=3000))
        q0 = sample(base, 0.0)
        dN = abs(q0 - sample(fine, 0.0))
        dS = abs(q0 - sample(wide, 0.0))
        fit = verify_asymptotics(base)
        exp_ok = abs(fit.exponent - (-2 / 3)) <= 0.1
        ok = base.converged and base.residual_sup < 1e-8 and dN < 1e-6 and dS < 1e-6 and exp_ok
        summary = (f"residual {base.residual_sup:.2e}; q(0)={q0:.10f}, N-doubling {dN:.1e}, "
                   f"S->60 {dS:.1e}; tail exponent {fit.exponent:.3f} vs -2/3 +- 0.1")
        return ok, summary, {"residual_sup": base.residual_sup, "q0": q0, "dq0_N": dN,
                             "dq0_S": dS, "exponent": fit.exponent, "exponent_ok": exp_ok,
                             "c_fit": fit.c_fit}
    return _timed("A5", 60.0, run)


def a6_m4_solution() -> Criterion:
    from pilab.painleve import BvpConfig, solve_pole_free, verify_asymptotics

    def run():
        sol = solve_pole_free(BvpConfig(m=4, S=60, **M4_CONFIG))
        fit = verify_asymptotics(sol)
        exp_ok = abs(fit.exponent - (-4 / 5)) <= 0.15
        ok = sol.converged and sol.residual_sup < 1e-6 and exp_ok
        summary = (f"residual {sol.residual_sup:.2e} on [-60,60]; tail exponent "
                   f"{fit.exponent:.3f} vs -4/5 +- 0.15")
        return ok, summary, {"residual_sup": sol.residual_sup, "exponent": fit.exponent,
                             "exponent_ok": exp_ok, "c_fit": fit.c_fit}
    return _timed("A6", 300.0, run)


# --- A7 ---------------------------------------------------------------------

def a7_flows() -> Criterion:
    from pilab.painleve import BvpConfig, flow_residual, solve_pole_free

    def run():
        cfg2 = BvpConfig(m=2, S=40, N=2000)
        r2 = flow_residual(cfg2, 1, 1e-3).residual
        cfg4 = BvpConfig(m=4, S=60, **M4_CONFIG)
        base4 = solve_pole_free(cfg4)
        r4 = {k: flow_residual(cfg4, k, 1e-3, base=base4).residual for k in (1, 2, 3)}
        ok = r2 < 1e-4 and all(v < 1e-3 for v in r4.values())
        summary = f"m=2 k=1: {r2:.2e} (< 1e-4); m=4: " + \
            ", ".join(f"k={k}: {v:.2e}" for k, v in r4.items()) + " (< 1e-3)"
        return ok, summary, {"m2": r2, "m4": {str(k): v for k, v in r4.items()}}
    return _timed("A7", 300.0, run)


# --- A8 ---------------------------------------------------------------------

def a8_catastrophe() -> Criterion:
    from pilab.kdvlab import build_initial_data, critical_point

    def run():
        cp = critical_point(build_initial_data(2), 2)
        want = {"t_c": math.sqrt(3) / 8, "u_c": -2 / 3,
                "x_c": -math.sqrt(3) / 2 + math.atanh(-1 / math.sqrt(3))}
        got = {"t_c": cp.t_c, "u_c": cp.u_c, "x_c": cp.x_c}
        dev = {k: abs(got[k] - want[k]) for k in want}
        ok = all(v < 1e-8 for v in dev.values())
        return ok, ", ".join(f"{k}={got[k]:.12f} (dev {dev[k]:.1e})" for k in want), \
            {"got": got, "dev": dev}
    return _timed("A8", None, run)


# --- A9 / A10 ---------------------------------------------------------------

def _double_scaling(name: str, m: int, budget: float) -> Criterion:
    from pilab.kdvlab import build_initial_data, compare_double_scaling

    def run():
        rep = compare_double_scaling(build_initial_data(m), m, [2e-2, 1e-2])
        r_ok = abs(rep.rate - rep.rate_expected) <= 0.2
        lead = [abs(v / rep.sup_q - 1) for v in rep.leading_ratio]
        l_ok = all(v <= 0.25 for v in lead)
        ok = r_ok and (l_ok if m == 2 else True)
        summary = (f"rate {rep.rate:.3f} vs {rep.rate_expected:.3f} +- 0.2; err {rep.err}; "
                   f"leading/sup|q| - 1 = {[round(v, 3) for v in lead]}")
        return ok, summary, rep.to_record()
    return _timed(name, budget, run)


def a9_double_scaling_m2() -> Criterion:
    return _double_scaling("A9", 2, 600.0)


def a10_double_scaling_m4() -> Criterion:
    return _double_scaling("A10", 4, 1800.0)


FAST = [a1_fixtures, a2_recursion_and_lax, a3_pi2_crosscheck, a4_positivity,
        a5_m2_solution, a6_m4_solution, a7_flows, a8_catastrophe]
LONG = [a9_double_scaling_m2, a10_double_scaling_m4]


def verify_all(long: bool = False) -> List[Criterion]:
    return [check() for check in FAST + (LONG if long else [])]
