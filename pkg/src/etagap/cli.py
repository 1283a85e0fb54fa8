"""Command-line front end.

Subcommands: ``spectrum`` (solve + validate, write the spectrum CSV),
``verify`` (full pipeline with selected checks), ``lemma31`` (seeded
property run of the sequence inequality) and ``report`` (render a summary
JSON).  Exit codes are the machine contract: 0 pass, 1 fail, 2
inconclusive-only, 3 usage or config error.  ETAGAP_THREADS caps worker
threads for the numerical kernels.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np


def _cap_threads() -> None:
    cap = os.environ.get("ETAGAP_THREADS")
    if not cap:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, cap)
    try:
        from threadpoolctl import threadpool_limits

        threadpool_limits(int(cap))
    except Exception:
        pass


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _add_overrides(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--resolution", type=int, nargs="+", help="cells per axis override")
    parser.add_argument("--k", help="eigenpair count override (or 'full')")
    parser.add_argument("--solve-tol", dest="solve_tol", help="residual tolerance override")
    parser.add_argument("--ortho-tol", dest="ortho_tol", help="orthonormality tolerance override")
    parser.add_argument("--seed", type=int, help="solver seed override")
    parser.add_argument("--dense", action="store_true", help="force the dense fallback solver")
    parser.add_argument("--out", help="output directory")


def _overrides_from(args) -> dict:
    ov = {
        "resolution": args.resolution,
        "k": args.k,
        "solve_tol": args.solve_tol,
        "ortho_tol": args.ortho_tol,
        "seed": args.seed,
        "output_dir": args.out,
    }
    if args.dense:
        ov["method"] = "dense"
    return ov


def cmd_spectrum(args) -> int:
    from .errors import ConfigError, DimensionMismatch, EtagapError
    from .scenario import apply_overrides, load_config, run_scenario

    try:
        cfg = load_config(args.config)
        cfg = apply_overrides(cfg, _overrides_from(args))
        cfg.verify = []
        cfg.theorems = []
        cfg.oracle = None
        report = run_scenario(cfg, output_dir=args.out)
    except (ConfigError, DimensionMismatch, FileNotFoundError, json.JSONDecodeError) as exc:
        _log(f"config error: {exc}")
        return 3
    except EtagapError as exc:
        _log(f"run failed: {type(exc).__name__}: {exc}")
        return 1
    for name, (ok, margin) in report.validation.checks.items():
        _log(f"{'PASS' if ok else 'FAIL'} {name} (margin {margin:.3e})")
    _log(f"wrote: {', '.join(report.written)}")
    return 0 if report.validation.ok else 1


def cmd_verify(args) -> int:
    from .errors import ConfigError, DimensionMismatch, EtagapError
    from .scenario import CHECK_NAMES, apply_overrides, load_config, run_scenario

    try:
        cfg = load_config(args.config)
        cfg = apply_overrides(cfg, _overrides_from(args))
        if args.checks:
            wanted = [c.strip() for c in args.checks.split(",") if c.strip()]
            for c in wanted:
                if c not in CHECK_NAMES:
                    raise ConfigError(f"unknown check {c!r}")
            cfg.verify = wanted
        report = run_scenario(cfg, output_dir=args.out)
    except (ConfigError, DimensionMismatch, FileNotFoundError, json.JSONDecodeError) as exc:
        _log(f"config error: {exc}")
        return 3
    except EtagapError as exc:
        _log(f"run failed: {type(exc).__name__}: {exc}")
        return 1
    counts = report.counts()
    _log(
        f"{report.name}: pass={counts['pass']} fail={counts['fail']} "
        f"inconclusive={counts['inconclusive']} skipped={counts['skipped']} "
        f"errors={counts['errors']}"
    )
    for err in report.errors:
        _log(f"ERROR {err}")
    _log(f"wrote: {', '.join(report.written)}")
    return report.exit_code()


def cmd_lemma31(args) -> int:
    from .bounds import lemma31_check, random_lemma31_instance

    if args.trials < 1:
        _log("trials must be >= 1")
        return 3
    rng = np.random.default_rng(args.seed)
    checked = 0
    counterexamples = []
    for _ in range(args.trials):
        inst = random_lemma31_instance(rng)
        res = lemma31_check(inst)
        if res.hypothesis_ok:
            checked += 1
            if not res.conclusion_ok:
                counterexamples.append((inst, res))
    _log(f"trials={args.trials} hypothesis_satisfied={checked} counterexamples={len(counterexamples)}")
    for inst, res in counterexamples:
        print(json.dumps({"mu": list(inst.mu), "r": list(inst.r), "s": res.s, "bound": res.bound}))
    return 0 if not counterexamples else 1


def cmd_report(args) -> int:
    path = Path(args.summary)
    if not path.is_file():
        _log(f"no summary file at {path}")
        return 3
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        counts = data["counts"]
    except (json.JSONDecodeError, KeyError) as exc:
        _log(f"malformed summary: {exc}")
        return 3
    _log(f"{data.get('name', '?')}:")
    for key in sorted(counts):
        _log(f"  {key}: {counts[key]}")
    for tag, rep in data.get("gap_reports", {}).items():
        _log(f"  {tag}: C = {rep['constant']:.6g}, exponent = {rep['exponent']:.4g}")
    return int(data.get("exit_code", 0))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="etagap", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_spec = sub.add_parser("spectrum", help="solve and validate the low spectrum")
    p_spec.add_argument("config", help="config file path or builtin scenario name")
    _add_overrides(p_spec)
    p_spec.set_defaults(func=cmd_spectrum)

    p_ver = sub.add_parser("verify", help="run the full verification pipeline")
    p_ver.add_argument("config", help="config file path or builtin scenario name")
    p_ver.add_argument("--checks", help="comma list from gap,yang,cor32,lemma32,parseval")
    _add_overrides(p_ver)
    p_ver.set_defaults(func=cmd_verify)

    p_l31 = sub.add_parser("lemma31", help="seeded property run of the sequence inequality")
    p_l31.add_argument("--trials", type=int, default=10000)
    p_l31.add_argument("--seed", type=int, default=0)
    p_l31.set_defaults(func=cmd_lemma31)

    p_rep = sub.add_parser("report", help="render a summary JSON")
    p_rep.add_argument("summary", help="path to summary.json")
    p_rep.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    _cap_threads()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 3 if exc.code not in (0, None) else 0
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
