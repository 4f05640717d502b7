"""Command-line front end.

Exit codes: 0 success, 1 invalid input or config, 2 numerical failure
(factorization, coprimeness, divergence). Outputs are rendered in memory
first and only then written, so a failing command leaves no files behind.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .config import load_config, parse_grid, parse_scenario, with_point
from .errors import ConfigError, ControlError, InvalidInputError, NumericalError
from .lti import freq_response
from .metrics import metrics_dict
from .simulation import ScenarioConfig, TwoDofSpec, format_number, run_closed_loop, trace_csv
from .synthesis import (
    PidGains,
    closed_loop,
    design_2dof,
    pid_controller,
    verify_internal_stability,
)

log = logging.getLogger("sea2dof")

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2
TRANSFERS = ("plant", "T_ref", "T_dist", "T_noise")
INDEX_METRICS = ("rise_time_s", "settling_time_s", "overshoot_pct", "control_energy")
FAILED = "FAILED"


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _write_outputs(files: dict) -> list[str]:
    """Write ``{path: text}`` atomically; on any failure remove what was written."""
    written = []
    try:
        for path, text in files.items():
            directory = os.path.dirname(os.path.abspath(path))
            os.makedirs(directory, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
            with os.fdopen(fd, "w", newline="\n", encoding="utf-8") as fh:
                fh.write(text)
            os.replace(tmp, path)
            written.append(path)
    except BaseException:
        for path in written:
            os.remove(path)
        raise
    return written


def _step_target(cfg: ScenarioConfig):
    ref = cfg.reference
    if ref.kind == "step" and ref.amplitude != 0:
        return ref.amplitude
    return None


def design_payload(cfg: ScenarioConfig) -> dict:
    """Controller JSON (reloadable as an ``explicit`` controller) plus diagnostics."""
    P = cfg.plant_transfer()
    ctrl = cfg.controller
    if isinstance(ctrl, TwoDofSpec):
        design = design_2dof(P, ctrl.rho, ctrl.lam, ctrl.k)
        payload = {"type": "explicit", **design.to_dict()}
        C1, C2 = design.C1, design.C2
        diagnostics = {
            "bezout_residual": design.bezout_residual,
            "condition_number": design.condition_number,
        }
    elif isinstance(ctrl, PidGains):
        C1, C2 = pid_controller(ctrl)
        payload = {
            "type": "explicit",
            "c1": C1.to_dict(),
            "c2": C2.to_dict(),
            "pid": {"Kp": ctrl.Kp, "Ki": ctrl.Ki, "Kd": ctrl.Kd, "N": ctrl.N},
        }
        diagnostics = {}
    else:
        C1, C2 = ctrl.C1, ctrl.C2
        payload = {"type": "explicit", "c1": C1.to_dict(), "c2": C2.to_dict()}
        diagnostics = {}
    report = verify_internal_stability(P, C1, C2)
    diagnostics.update(report.to_dict())
    payload["diagnostics"] = diagnostics
    return payload


def cmd_design(args) -> int:
    cfg = parse_scenario(load_config(args.config), args.seed)
    payload = design_payload(cfg)
    _write_outputs({args.out: _dumps(payload)})
    verdict = "stable" if payload["diagnostics"]["stable"] else "UNSTABLE"
    print(f"design written to {args.out}: closed loop {verdict}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = parse_scenario(load_config(args.config), args.seed)
    trace = run_closed_loop(cfg)
    metrics = metrics_dict(trace, _step_target(cfg))
    metrics_path = args.metrics or os.path.splitext(args.out)[0] + ".metrics.json"
    _write_outputs({args.out: trace_csv(trace), metrics_path: _dumps(metrics)})
    summary = ", ".join(
        f"{k}={format_number(v) if v is not None else 'n/a'}" for k, v in metrics.items()
    )
    print(summary)
    return EXIT_OK


def _sweep_point(cfg: ScenarioConfig):
    try:
        trace = run_closed_loop(cfg)
        return True, metrics_dict(trace, _step_target(cfg))
    except ControlError as exc:
        return False, str(exc)


def cmd_sweep(args) -> int:
    data = load_config(args.config)
    base = parse_scenario(data, args.seed)
    names, points = parse_grid(data, base)
    cfgs = [with_point(base, names, pt) for pt in points]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_point, cfgs))
    else:
        results = [_sweep_point(c) for c in cfgs]

    files = {}
    rows = [",".join(list(names) + list(INDEX_METRICS))]
    for i, (pt, (ok, res)) in enumerate(zip(points, results)):
        path = os.path.join(args.out, f"point_{i:04d}.json")
        params = [format_number(v) for v in pt]
        if ok:
            files[path] = _dumps(res)
            vals = [format_number(res[m]) if res[m] is not None else "" for m in INDEX_METRICS]
        else:
            files[path] = _dumps({"status": "failed", "error": res})
            vals = [FAILED] * len(INDEX_METRICS)
            log.warning("grid point %d failed: %s", i, res)
        rows.append(",".join(params + vals))
    files[os.path.join(args.out, "index.csv")] = "\n".join(rows) + "\n"
    n_ok = sum(ok for ok, _ in results)
    if n_ok == 0:
        print("every grid point failed", file=sys.stderr)
        return EXIT_NUMERICAL
    _write_outputs(files)
    print(f"{n_ok}/{len(points)} grid points succeeded; index at {args.out}/index.csv")
    return EXIT_OK


def cmd_freqresp(args) -> int:
    if not (args.w_min > 0 and args.w_max > args.w_min and args.points >= 2):
        raise ConfigError("need 0 < w_min < w_max and points >= 2")
    data = load_config(args.config)
    if args.transfer == "plant":
        cfg = parse_scenario({**data, "controller": {"type": "pid", "Kp": 1.0}}, args.seed)
        tf = cfg.plant_transfer()
    else:
        cfg = parse_scenario(data, args.seed)
        C1, C2 = cfg.controller_transfers()
        loop = closed_loop(cfg.plant_transfer(), C1, C2)
        tf = getattr(loop, args.transfer)
    omegas = np.geomspace(args.w_min, args.w_max, args.points)
    H = freq_response(tf, omegas)
    rows = ["omega_rad_s,mag_abs,phase_deg"]
    for w, h in zip(omegas, H):
        mag = abs(h)
        phase = float(np.degrees(np.angle(h))) if np.isfinite(mag) else float("nan")
        rows.append(",".join(format_number(v) for v in (w, mag, phase)))
    _write_outputs({args.out: "\n".join(rows) + "\n"})
    return EXIT_OK


def _u64(text):
    val = int(text)
    if not 0 <= val < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return val


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sea2dof", description="2-DOF force control design and simulation for an SEA"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="scenario config JSON")
        p.add_argument("--out", required=True, help="output path")
        p.add_argument("--seed", type=_u64, default=None, help="override the config seed")

    p = sub.add_parser("design", help="design a controller and write its JSON")
    common(p)
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("simulate", help="simulate a scenario; write trace CSV and metrics JSON")
    common(p)
    p.add_argument("--metrics", default=None, help="metrics JSON path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="simulate every point of a weight/gain grid")
    common(p)
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("freqresp", help="frequency response over a log-spaced grid")
    common(p)
    p.add_argument("--w-min", type=float, default=0.1)
    p.add_argument("--w-max", type=float, default=1000.0)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--transfer", choices=TRANSFERS, default="T_ref")
    p.set_defaults(func=cmd_freqresp)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
