"""Execute a validated RunManifest and write its artifacts."""

from __future__ import annotations

import sys
from pathlib import Path
from typing import Callable, Dict, TextIO

import numpy as np

from pilab.cli.config import load_config
from pilab.cli.jsonfmt import dumps, write_csv, write_json
from pilab.cli.manifest import RunManifest
from pilab.errors import ConfigInvalid, PilabError, WindowTooSmall


def _out_path(manifest: RunManifest, key: str, out_dir: Path | None, default: str | None):
    name = manifest.outputs.get(key, default)
    if name is None:
        return None
    p = Path(name)
    return p if p.is_absolute() or out_dir is None else out_dir / p


def _emit(obj, manifest, out_dir, stdout, default=None):
    text = dumps(obj)
    path = _out_path(manifest, "json", out_dir, default)
    if path is None:
        stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)


def _tabular(manifest, out_dir, default_csv, header, columns, side):
    """CSV plus JSON sidecar, or a single JSON document holding the columns."""
    csv_path = _out_path(manifest, "csv", out_dir, None)
    json_path = _out_path(manifest, "json", out_dir, None)
    if csv_path is None and json_path is None:
        csv_path = _out_path(manifest, "csv", out_dir, default_csv)
    if csv_path is not None:
        write_csv(csv_path, header, columns)
        write_json(json_path or csv_path.with_suffix(".json"), side)
    else:
        doc = dict(side)
        doc.update({name: np.asarray(col) for name, col in zip(header, columns)})
        write_json(json_path, doc)


# --- commands ----------------------------------------------------------------

def _hierarchy(p, manifest, out_dir, stdout, jobs):
    from pilab.diffpoly import generate_equation
    eq = generate_equation(p["m"], allow_odd=p.get("allow_odd", False))
    fmt = p.get("format", "json")
    if fmt == "json":
        _emit(eq.to_json_obj(), manifest, out_dir, stdout)
    elif fmt == "text":
        stdout.write(f"{eq.paper_normalized} = 0\n")
    else:
        raise ConfigInvalid(f"unknown format {fmt!r}")


def _gfun(p, manifest, out_dir, stdout, jobs):
    from pilab.gfun import make_gfunction, pi2_crosscheck, verify_positivity
    spec = make_gfunction(p["m"], p.get("sign", 1))
    rep = verify_positivity(spec)
    rec = {"m": spec.m, "sign": spec.sign_s, "z0": spec.z0, "c_asym": spec.c_asym,
           "c_coeffs": [str(c) for c in spec.c_coeffs], "b_coeffs": [str(c) for c in spec.b_coeffs],
           "positivity": rep.passed, "crosscheck": pi2_crosscheck()}
    _emit(rec, manifest, out_dir, stdout)


def _painleve(p, manifest, out_dir, stdout, jobs):
    from pilab.painleve import BvpConfig, solve_pole_free, verify_asymptotics
    m = p["m"]
    kw = {k: p[k] for k in ("S", "N", "stencil_order", "newton_tol") if k in p}
    cfg = BvpConfig(m=m, t=tuple(p.get("t", ())), **kw).validate()
    sol = solve_pole_free(cfg)
    try:
        fit = verify_asymptotics(sol)
        fexp, fc = fit.exponent, fit.c_fit
    except WindowTooSmall:
        fexp = fc = None
    side = {"m": m, "t": list(cfg.t), "S": cfg.S, "N": cfg.N, "residual_sup": sol.residual_sup,
            "newton_iters": sol.newton_iters, "fitted_exponent": fexp, "fitted_c": fc}
    _tabular(manifest, out_dir, "sol.csv", ("s", "q"), (sol.s_grid, sol.q_values), side)


def _data_from(p):
    from pilab.kdvlab import build_initial_data
    cfg = load_config(p["data"]) if "data" in p else {}
    d = dict(cfg.get("data", {}))
    m = int(p.get("m", d.pop("m", 2)))
    d.pop("m", None)
    if "L" in p:
        d["L"] = p["L"]
    elif "L" in cfg.get("grid", {}):
        d["L"] = cfg["grid"]["L"]
    return m, build_initial_data(m, d), cfg


def _kdv(p, manifest, out_dir, stdout, jobs):
    from pilab.kdvlab import critical_point, kdv_evolve
    action = p["action"]
    if action == "compare":
        return _compare(p, manifest, out_dir, stdout, jobs)
    m, data, cfg = _data_from(p)
    if action == "critical":
        cp = critical_point(data, m)
        F = cp.residuals(data)
        rec = {"m": m, "x_c": cp.x_c, "t_c": cp.t_c, "u_c": cp.u_c, "k": cp.k,
               "t_c_system": cp.t_c_system, "fL_derivs": list(cp.fL_derivs),
               "residuals": {"F": F[0], "F1": F[1], "F2": F[2]}}
        _emit(rec, manifest, out_dir, stdout)
        return
    grid = cfg.get("grid", {})
    eps = p.get("eps", [1e-2])
    if len(eps) != 1:
        raise ConfigInvalid("kdv run takes a single eps")
    fld = kdv_evolve(data, eps[0], float(p.get("t", 0.0)), N=int(p.get("N", grid.get("N", 8192))),
                     dt=p.get("dt", grid.get("dt")))
    side = {"eps": fld.eps, "t": fld.t, "L": fld.L, "N": fld.N, "mass": fld.mass(),
            "tail_ratio": fld.tail_ratio, "steps": fld.steps}
    _tabular(manifest, out_dir, "u.csv", ("x", "u"), (fld.x, fld.values), side)


def _compare(p, manifest, out_dir, stdout, jobs):
    from pilab.kdvlab import DEFAULT_WINDOW, compare_double_scaling
    m, data, cfg = _data_from(p)
    cmp_cfg = cfg.get("compare", {})
    eps = p.get("eps", cmp_cfg.get("eps"))
    if not eps:
        raise ConfigInvalid("compare needs at least one eps")
    win = p.get("window")
    if win is not None:
        if len(win) != 4:
            raise ConfigInvalid("window takes s_lo,s_hi,t1_lo,t1_hi")
        window = ((win[0], win[1]), (win[2], win[3]))
    else:
        ws = cmp_cfg.get("window_s", DEFAULT_WINDOW[0])
        wt = cmp_cfg.get("window_t1", DEFAULT_WINDOW[1])
        window = (tuple(ws), tuple(wt))
    rep = compare_double_scaling(data, m, eps, window=window,
                                 n_s=int(p.get("n_s", cmp_cfg.get("n_s", 41))),
                                 n_t=int(p.get("n_t", cmp_cfg.get("n_t", 5))),
                                 N=int(p.get("N", cfg.get("grid", {}).get("N", 16384))), jobs=jobs)
    _emit(rep.to_record(), manifest, out_dir, stdout, default="report.json")


HANDLERS: Dict[str, Callable] = {"hierarchy": _hierarchy, "gfun": _gfun, "painleve": _painleve,
                                 "kdv": _kdv, "compare": _compare}


def run(manifest: RunManifest, out_dir=None, jobs: int = 1, stdout: TextIO | None = None,
        stderr: TextIO | None = None) -> int:
    """0 on success, 2 on invalid input, 3 on solver failure; errors go to stderr as JSON."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    out_dir = Path(out_dir) if out_dir else None
    try:
        manifest.validate()
        HANDLERS[manifest.command](manifest.parameters, manifest, out_dir, stdout, jobs)
    except PilabError as exc:
        stderr.write(dumps(exc.to_record()))
        return exc.exit_code
    except np.linalg.LinAlgError as exc:
        stderr.write(dumps({"error": "LinAlgError", "message": str(exc)}))
        return 3
    return 0
