"""Command-line entry points.

Subcommands: ``pointvortex`` (integrate the ODE system), ``simulate`` (one
paired cloud/point-vortex run), ``sweep`` (concentration-scale sweep with
rate fits and plots), ``metrics`` (recompute transport metrics from exported
CSV files without re-simulating).

Exit codes: 0 success, 1 usage/validation error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from datetime import datetime, timezone

import numpy as np

from . import __version__, _backend
from .config import RunConfig, parse_config, serialize_config
from .errors import ConfigError, VortexLabError
from .experiments import run_pairing_detailed, run_sweep
from .io import (read_cloud_csv, read_measure_csv, sweep_summary_doc,
                 write_cloud_csv, write_diagnostics_csv, write_manifest,
                 write_pv_trajectory_csv)
from .plots import emit_svg_plots


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="vortexlab")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)
    for name in ("pointvortex", "simulate", "sweep", "metrics"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int, help="override config seed")
        p.add_argument("--threads", type=int,
                       help="cap solver-level parallelism")
        p.add_argument("--deterministic", action="store_true",
                       help="force deterministic reductions")
    return parser


def _load_config(args) -> RunConfig:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    cfg = parse_config(text)
    if cfg.mode != args.command:
        raise ConfigError(
            f"config mode {cfg.mode!r} does not match subcommand "
            f"{args.command!r}", "mode")
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.deterministic:
        overrides["deterministic"] = True
    if overrides:
        cfg.numerics = replace(cfg.numerics, **overrides)
    if args.out:
        cfg.output_dir = args.out
    if cfg.output_dir is None:
        raise ConfigError("no output directory (set output_dir or --out)",
                          "output_dir")
    return cfg


def _run_pointvortex(cfg: RunConfig, out_dir: str) -> None:
    from .pointvortex import PointVortexState, pv_integrate

    state = PointVortexState(cfg.pv_positions, cfg.pv_intensities)
    num = cfg.numerics
    traj = pv_integrate(state, num.dt, num.horizon,
                        sample_every=max(1, num.record_every or 1),
                        collision_floor=0.0)
    write_pv_trajectory_csv(traj, os.path.join(out_dir, "pv_trajectory.csv"))


def _run_simulate(cfg: RunConfig, out_dir: str) -> None:
    run = run_pairing_detailed(cfg.initial_data, cfg.numerics)
    write_diagnostics_csv(run.records,
                          os.path.join(out_dir, "diagnostics.csv"))
    write_cloud_csv(run.initial_cloud,
                    os.path.join(out_dir, "cloud_initial.csv"))


def _run_sweep(cfg: RunConfig, out_dir: str) -> None:
    result = run_sweep(cfg.initial_data, cfg.sweep_epsilons, cfg.numerics)
    for eps, run in zip(result.epsilons, result.runs):
        name = f"diagnostics_eps{eps:.4f}.csv"
        write_diagnostics_csv(run.records, os.path.join(out_dir, name))
    with open(os.path.join(out_dir, "sweep_summary.json"), "w",
              encoding="utf-8") as fh:
        json.dump(sweep_summary_doc(result), fh, indent=2, sort_keys=True)
        fh.write("\n")
    if len(result.epsilons) >= 2:
        emit_svg_plots(result, os.path.join(out_dir, "sweep_plots.svg"))


def _run_metrics(cfg: RunConfig, out_dir: str) -> None:
    from .measures import w1_exact, w1_signed
    from .metrics import (CutoffSpec, center_of_vorticity, outer_mass,
                          smoothed_outer_mass, w2_to_dirac)
    from .vpm import component_support_distance, lp_norm_estimate

    task = cfg.metrics
    doc = {}
    if task.measure_csvs is not None:
        mu = read_measure_csv(task.measure_csvs[0])
        nu = read_measure_csv(task.measure_csvs[1])
        if (mu.mass < 0).any() or (nu.mass < 0).any():
            cost = w1_signed(mu, nu)
        else:
            cost, _ = w1_exact(mu, nu)
        doc["w1"] = cost
        print(f"W1 = {cost!r}")
    if task.cloud_csv is not None:
        cloud = read_cloud_csv(task.cloud_csv, pitch=task.pitch)
        comps = []
        for i in range(cloud.n_components):
            x_i = center_of_vorticity(cloud, i)
            entry = {
                "component": i,
                "intensity": cloud.intensity(i),
                "center": x_i.tolist(),
                "w2_center": w2_to_dirac(cloud, x_i, i),
                "outer_mass": {repr(r): outer_mass(cloud, i, r, center=x_i)
                               for r in task.radii},
                "smoothed_outer_mass": {
                    repr(r): smoothed_outer_mass(
                        cloud, i, CutoffSpec(rho=r, band=r / 8.0,
                                             center=x_i))
                    for r in task.radii},
            }
            comps.append(entry)
        doc["components"] = comps
        doc["support_distance"] = _finite_or_none(
            component_support_distance(cloud))
        if cloud.pitch is not None:
            doc["lp_norm"] = lp_norm_estimate(cloud, task.p_exponent)
    with open(os.path.join(out_dir, "metrics.json"), "w",
              encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _finite_or_none(x):
    x = float(x)
    return x if np.isfinite(x) else None


_RUNNERS = {
    "pointvortex": _run_pointvortex,
    "simulate": _run_simulate,
    "sweep": _run_sweep,
    "metrics": _run_metrics,
}


def cli_dispatch(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        cfg = _load_config(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if args.threads is not None:
        _backend.set_threads(args.threads)

    started = datetime.now(timezone.utc).isoformat()
    out_dir = cfg.output_dir
    try:
        os.makedirs(out_dir, exist_ok=True)
        _RUNNERS[cfg.mode](cfg, out_dir)
        finished = datetime.now(timezone.utc).isoformat()
        write_manifest(out_dir, json.loads(serialize_config(cfg)),
                       started, finished, __version__)
    except VortexLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
