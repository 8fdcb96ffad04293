"""Command-line front end: ``pilab <command> ...``.

Every subcommand is translated into a :class:`RunManifest` and executed by
:func:`pilab.cli.runner.run`, so ``pilab run manifest.json`` reproduces any
invocation exactly.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from pilab.cli.jsonfmt import dumps, write_json
from pilab.cli.manifest import RunManifest
from pilab.cli.runner import run
from pilab.errors import SchemaViolation


def _floats(text: str):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pilab", description=__doc__.splitlines()[0])
    ap.add_argument("--jobs", type=int, default=1, help="parallel sub-experiments")
    ap.add_argument("--out-dir", default=None, help="directory for relative output paths")
    ap.add_argument("--format", dest="global_format", choices=("csv", "json"), default="csv",
                    help="tabular output: CSV with a JSON sidecar, or JSON only")
    ap.add_argument("--save-manifest", default=None, help="also write the run manifest here")
    sub = ap.add_subparsers(dest="command", required=True)

    h = sub.add_parser("hierarchy", help="generate P_I^m equations")
    hs = h.add_subparsers(dest="action", required=True)
    g = hs.add_parser("gen")
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--format", choices=("json", "text"), default="json")
    g.add_argument("--allow-odd", action="store_true")
    g.add_argument("--out")

    gf = sub.add_parser("gfun", help="g-function data and positivity certificate")
    gf.add_argument("--m", type=int, required=True)
    gf.add_argument("--sign", type=int, choices=(1, -1), default=1)
    gf.add_argument("--out")

    p = sub.add_parser("painleve", help="pole-free P_I^m solutions")
    ps = p.add_subparsers(dest="action", required=True)
    so = ps.add_parser("solve")
    so.add_argument("--m", type=int, required=True)
    so.add_argument("--t", type=_floats)
    so.add_argument("--S", type=float)
    so.add_argument("--N", type=int)
    so.add_argument("--stencil-order", type=int)
    so.add_argument("--newton-tol", type=float)
    so.add_argument("--out", default="sol.csv")

    k = sub.add_parser("kdv", help="small-dispersion KdV experiments")
    ks = k.add_subparsers(dest="action", required=True)
    for name in ("critical", "run", "compare"):
        kp = ks.add_parser(name)
        kp.add_argument("--data", help="INI file with [data], [grid], [compare] sections")
        kp.add_argument("--m", type=int)
        if name in ("run", "compare"):
            kp.add_argument("--eps", type=_floats)
            kp.add_argument("--N", type=int)
        if name == "run":
            kp.add_argument("--t", type=float)
            kp.add_argument("--L", type=float)
            kp.add_argument("--dt", type=float)
        if name == "compare":
            kp.add_argument("--window", type=_floats, help="s_lo,s_hi,t1_lo,t1_hi")
        kp.add_argument("--out")

    c = sub.add_parser("compare", help="double-scaling comparison (same as kdv compare)")
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--eps", type=_floats, required=True)
    c.add_argument("--data")
    c.add_argument("--N", type=int)
    c.add_argument("--window", type=_floats)
    c.add_argument("--out")

    v = sub.add_parser("verify", help="run the acceptance criteria")
    grp = v.add_mutually_exclusive_group()
    grp.add_argument("--fast", action="store_true", help="A1-A8 (default)")
    grp.add_argument("--long", action="store_true", help="A1-A10")
    v.add_argument("--out", help="JSON report path")

    r = sub.add_parser("run", help="execute a manifest file")
    r.add_argument("manifest")
    return ap


_PARAM_KEYS = {
    "hierarchy": ("action", "m", "format", "allow_odd"),
    "gfun": ("m", "sign"),
    "painleve": ("action", "m", "t", "S", "N", "stencil_order", "newton_tol"),
    "kdv": ("action", "m", "data", "eps", "t", "L", "N", "dt", "window"),
    "compare": ("m", "data", "eps", "N", "window"),
}


def manifest_from_args(args) -> RunManifest:
    params = {}
    for key in _PARAM_KEYS[args.command]:
        val = getattr(args, key, None)
        if val is None or (key == "allow_odd" and not val):
            continue
        params[key] = val
    outputs = {}
    out = getattr(args, "out", None)
    if out:
        tabular = args.command == "painleve" or (args.command == "kdv" and args.action == "run")
        if tabular and args.global_format == "csv":
            outputs["csv"] = out
        else:
            outputs["json"] = out if not tabular else str(Path(out).with_suffix(".json"))
    return RunManifest(args.command, params, outputs)


def _verify(args) -> int:
    from pilab.acceptance import verify_all
    results = verify_all(long=args.long)
    for crit in results:
        print(crit.line(), flush=True)
    if args.out:
        path = Path(args.out)
        if args.out_dir and not path.is_absolute():
            path = Path(args.out_dir) / path
        write_json(path, [c.to_record() for c in results])
    return 0 if all(c.passed for c in results) else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        return _verify(args)
    if args.command == "run":
        try:
            manifest = RunManifest.from_json(Path(args.manifest).read_text(), where=args.manifest)
        except SchemaViolation as exc:
            sys.stderr.write(dumps(exc.to_record()))
            return exc.exit_code
        except OSError as exc:
            sys.stderr.write(dumps({"error": "SchemaViolation", "message": str(exc),
                                    "path": args.manifest}))
            return 2
    else:
        manifest = manifest_from_args(args)
    if args.save_manifest:
        Path(args.save_manifest).write_text(manifest.to_json())
    return run(manifest, out_dir=args.out_dir, jobs=args.jobs)


if __name__ == "__main__":
    sys.exit(main())
