"""Command-line entry point.

Commands: ``run <config>``, ``validate <config>``, ``field-sample <config>``.
Exit codes: 0 ok, 2 config error, 3 invariant violation, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .config import load_config
from .errors import (CflError, ConfigError, ConvergenceError,
                     InvariantViolation, NumericalError)
from .scenarios import run_field_sample, run_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVARIANT = 3
EXIT_NUMERICAL = 4


def build_parser():
    p = argparse.ArgumentParser(
        prog="dislosim",
        description="dislocation-dynamics scenario runner")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("run", "run the scenario named in the config"),
            ("validate", "dry-run validation: check the config, print "
                         "CFL and memory estimates"),
            ("field-sample", "sample the analytic straight-dislocation "
                             "fields onto CSV and figures")):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("config", help="path to the INI config file")
        sp.add_argument("--output-dir", default=None,
                        help="override the io.output_dir from the config")
        sp.add_argument("--seed", type=int, default=None,
                        help="override run.seed for randomized scenarios")
        sp.add_argument("--max-steps", type=int, default=None,
                        help="cap the number of time steps")
    return p


def _validate_report(cfg):
    res = cfg["geometry.resolution"]
    lengths = cfg["geometry.lengths"]
    spacing = [L / n for L, n in zip(lengths, res)]
    # generous speed bound: power-law mobility at twice the mean stress scale
    stress_scale = max(float(np.abs(cfg.mean_stress()).max()), 1.0)
    b_mag = float(np.linalg.norm(cfg["scenario.burgers"]))
    vmax = cfg["mobility.c"] * (2.0 * stress_scale * b_mag) ** cfg["mobility.gamma"]
    dt_cfl = 0.5 * min(spacing) / vmax
    n_nodes = res[0] * res[1] * res[2]
    # dominant arrays: a handful of rank-2 fields (9 components, complex
    # spectral copies) -> ~40 float64 per node
    mem_mb = n_nodes * 40 * 8 / 2**20
    print("ok")
    print(f"scenario: {cfg.scenario}")
    print(f"grid: {res[0]} x {res[1]} x {res[2]} "
          f"(spacing {min(spacing):.3g} .. {max(spacing):.3g})")
    print(f"CFL estimate: dt <= {dt_cfl:.3g} (config dt = {cfg['run.dt']:g})")
    print(f"memory estimate: ~{mem_mb:.0f} MiB")
    if cfg["run.dt"] > dt_cfl:
        print("warning: config dt exceeds the CFL estimate; steps will be "
              "clamped or rejected")


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.command == "validate":
            _validate_report(cfg)
            return EXIT_OK
        if args.command == "field-sample":
            out = args.output_dir or cfg["io.output_dir"]
            os.makedirs(out, exist_ok=True)
            summary = run_field_sample(
                cfg, out, args.seed or cfg["run.seed"],
                args.max_steps or cfg["run.max_steps"])
        else:
            summary = run_scenario(cfg, output_dir=args.output_dir,
                                   seed=args.seed, max_steps=args.max_steps)
        for key, val in summary.items():
            print(f"{key}: {val}")
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (NumericalError, ConvergenceError, CflError,
            FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
