"""Command-line entry point.

    mixbgk run [--example N | --config PATH] [--method be|rk4]
               [--dt X] [--t-final X] [--eps X] [--out DIR]

Writes ``<name>_trajectory.csv``, ``<name>_envelopes.csv`` and
``<name>_summary.txt`` into the output directory (the ``MIXBGK_OUT``
environment variable overrides ``--out``).  Exit codes: 0 all monitors
pass, 1 configuration error, 2 monitor violation, 3 integrator failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .equilibrium import decay_constants, decay_envelopes, steady_state
from .integrate import IntegrationError, simulate
from .output import (
    build_table,
    summary_text,
    write_envelope_csv,
    write_trajectory_csv,
)
from .scenarios import ScenarioError, parse_config, presets, resolve_integrator

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_MONITOR = 2
EXIT_INTEGRATOR = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mixbgk")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="integrate one scenario and verify its bounds")
    source = run.add_mutually_exclusive_group(required=True)
    source.add_argument("--example", type=int, choices=(1, 2, 3), help="preset scenario")
    source.add_argument("--config", type=str, help="scenario file path")
    run.add_argument("--method", choices=("be", "rk4"), help="time integrator override")
    run.add_argument("--dt", type=float, help="time step override (s)")
    run.add_argument("--t-final", type=float, help="horizon override (s)")
    run.add_argument("--eps", type=float, help="Knudsen number override")
    run.add_argument("--out", type=str, default=".", help="output directory")
    return parser


def run(args) -> int:
    try:
        if args.example is not None:
            scenario = presets()[args.example]
        else:
            scenario = parse_config(args.config)
        overrides = {}
        if args.method is not None:
            overrides["method"] = args.method
            overrides["dt"] = None  # method change invalidates a derived dt
        if args.dt is not None:
            overrides["dt"] = args.dt
        if args.t_final is not None:
            overrides["t_final"] = args.t_final
        if args.eps is not None:
            overrides["eps"] = args.eps
        if overrides:
            scenario = replace(scenario, **overrides)

        state = scenario.initial_state()
        model = scenario.frequency_model()
        integrator = resolve_integrator(scenario, state, model)
    except (ScenarioError, ValueError, OSError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG

    equilibrium = steady_state(state)
    constants = decay_constants(state, model)

    try:
        trajectory = simulate(state, integrator, model)
    except IntegrationError as err:
        print(f"integrator failure: {err}", file=sys.stderr)
        return EXIT_INTEGRATOR

    envelopes = decay_envelopes(constants, integrator.eps, trajectory.times)
    table = build_table(trajectory, envelopes)

    out_dir = os.environ.get("MIXBGK_OUT", args.out)
    os.makedirs(out_dir, exist_ok=True)
    base = os.path.join(out_dir, scenario.name)
    write_trajectory_csv(base + "_trajectory.csv", table)
    write_envelope_csv(base + "_envelopes.csv", table, equilibrium)
    summary = summary_text(scenario, integrator, table, equilibrium, constants)
    with open(base + "_summary.txt", "w", encoding="utf-8") as handle:
        handle.write(summary)

    picard_max = max(m.picard_iterations for m in trajectory.monitors)
    print(f"wrote {base}_trajectory.csv, {base}_envelopes.csv, {base}_summary.txt")
    print(f"records = {len(table.times)}, max Picard sweeps per step = {picard_max}")
    passed = summary.rstrip().splitlines()[-1].endswith("PASS")
    print("verification: " + ("PASS" if passed else "FAIL"))
    return EXIT_OK if passed else EXIT_MONITOR


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with its own code 2; fold usage errors into the
        # configuration-error class, keep --help's success exit.
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    if args.command == "run":
        return run(args)
    parser.print_usage(sys.stderr)
    return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
