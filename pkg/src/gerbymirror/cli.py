"""Command-line entry point: ``gerbymirror verify|mirror|report``.

Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error.
"""

import argparse
import dataclasses
import json
import sys
from importlib import resources

import numpy as np

from . import dhym_slag as dh
from . import torus_gcs as tg
from .config import load_config
from .errors import ConfigError, MirrorUndefined
from .suites import SUITES, run_suite


def reference_config_path():
    return resources.files("gerbymirror") / "data" / "reference.json"


def _add_common(p):
    p.add_argument("--config", metavar="PATH", help="JSON config ('-' for stdin); default: shipped reference")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--tol-abs", type=float, help="absolute tolerance")
    p.add_argument("--tol-phase", type=float, help="phase tolerance in radians")


def build_parser():
    parser = argparse.ArgumentParser(prog="gerbymirror", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=SUITES + ("all",))
    v.add_argument("--timings", action="store_true", help="include wall times (breaks byte-identical output)")
    _add_common(v)
    m = sub.add_parser("mirror", help="print the mirror data of the configured torus")
    _add_common(m)
    r = sub.add_parser("report", help="run every suite and write a JSON report with the config echoed")
    r.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    r.add_argument("--timings", action="store_true")
    _add_common(r)
    return parser


def _load(args):
    if args.config:
        cfg = load_config(args.config)
    else:
        with resources.as_file(reference_config_path()) as path:
            cfg = load_config(path)
    tol = cfg.tol
    try:
        if args.tol_abs is not None:
            tol = dataclasses.replace(tol, abs_tol=args.tol_abs)
        if args.tol_phase is not None:
            tol = dataclasses.replace(tol, phase_tol=args.tol_phase)
    except ValueError as exc:
        raise ConfigError(f"tolerances: {exc}") from None
    return dataclasses.replace(cfg, tol=tol)


def _cmat(m):
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(m, dtype=complex)]


def mirror_data(cfg):
    torus, tau = cfg.torus, np.asarray(cfg.tau)
    d = tg.extract_complexified_symplectic(tg.mirror(tg.b_transform(tg.gcs_from_complex(torus), tau)), cfg.tol)
    out = {
        "omega_mat": d.omega_mat.tolist(),
        "b_mat": d.b_mat.tolist(),
        "omega_xx": d.omega_xx.tolist(),
        "b_xx": d.b_xx.tolist(),
        "mirror_period_untwisted": _cmat(tg.extract_period_matrix(tg.mirror(tg.gcs_from_kahler(torus)), cfg.tol)),
    }
    try:
        dh.mirror_period(torus, tau, cfg.tol)
        got = tg.extract_period_matrix(tg.mirror(tg.b_transform(tg.gcs_from_kahler(torus), tau)), cfg.tol)
        out["mirror_period_twisted"] = _cmat(got)
    except MirrorUndefined as exc:
        out["mirror_period_twisted"] = None
        out["mirror_period_twisted_reason"] = str(exc)
    return out


def _print_mirror(data):
    for key, val in data.items():
        print(f"{key}:")
        if val is None or isinstance(val, str):
            print(f"  {val}")
            continue
        for row in val:
            cells = [f"{c[0]: .6f}{c[1]:+.6f}i" if isinstance(c, list) else f"{c: .6f}" for c in row]
            print("  " + "  ".join(cells))


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.command == "mirror":
        data = mirror_data(cfg)
        if args.json:
            print(json.dumps(data, indent=2, sort_keys=True))
        else:
            _print_mirror(data)
        return 0
    if args.command == "verify":
        rep = run_suite(cfg, args.suite, args.seed)
        print(rep.to_json(args.timings) if args.json else rep.to_text(args.timings))
        return rep.exit_code
    rep = run_suite(cfg, "all", args.seed)
    text = rep.to_json(args.timings, include_config=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        print(f"report written to {args.out}: {'PASS' if rep.passed else 'FAIL'}")
    else:
        print(text)
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
