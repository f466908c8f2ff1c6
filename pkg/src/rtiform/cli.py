"""Command-line front end.

Exit codes: 0 success, 2 invalid or infeasible scenario, 3 runtime
singularity, 4 I/O failure.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys

from .errors import InfeasibleScenario, ScenarioError, SimulationError
from .report import feasibility_report, render_text, write_csv as write_report_csv
from .scenario import builtin_scenarios, resolve_scenario
from .simulate import run

EXIT_OK = 0
EXIT_SCENARIO = 2
EXIT_SINGULARITY = 3
EXIT_IO = 4


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="rtiform",
        description="Rigid and pattern formations of fixed-wing UAV swarms: "
                    "feasibility analysis and closed-loop simulation.",
        epilog="Shipped scenarios: " + ", ".join(builtin_scenarios()),
    )
    p.add_argument("-v", "--verbose", action="count", default=0,
                   help="increase log verbosity (repeatable)")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("feasibility",
                       help="static per-follower slot feasibility for a scenario")
    f.add_argument("scenario", help="scenario file path or shipped scenario name")
    f.add_argument("--out", metavar="DIR",
                   help="also write the report as CSV into this directory")

    s = sub.add_parser("simulate", help="run the closed loop and export the logs")
    s.add_argument("scenario", help="scenario file path or shipped scenario name")
    s.add_argument("--out", metavar="DIR", default=".",
                   help="output directory (default: current directory)")
    s.add_argument("--step", type=float, metavar="H",
                   help="override the integration step [s]")
    s.add_argument("--duration", type=float, metavar="T",
                   help="override the simulated duration [s]")
    s.add_argument("--parallel", action="store_true",
                   help="evaluate same-layer followers concurrently")
    s.add_argument("--format", choices=("csv", "svg", "both"), default="csv",
                   help="which artifacts to write (default: csv)")

    v = sub.add_parser("validate",
                       help="check a scenario file without running it")
    v.add_argument("scenario", help="scenario file path or shipped scenario name")
    return p


def _cmd_feasibility(args) -> int:
    scenario = resolve_scenario(args.scenario)
    rows = feasibility_report(scenario)
    sys.stdout.write(render_text(scenario, rows))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        write_report_csv(os.path.join(args.out, f"{scenario.name}_feasibility.csv"), rows)
    return EXIT_OK if all(r.feasible for r in rows) else EXIT_SCENARIO


def _cmd_simulate(args) -> int:
    scenario = resolve_scenario(args.scenario)
    log = run(scenario, duration=args.duration, step_size=args.step,
              parallel=args.parallel)
    os.makedirs(args.out, exist_ok=True)
    wrote = []
    if args.format in ("csv", "both"):
        path = os.path.join(args.out, f"{scenario.name}_trajectory.csv")
        log.to_csv(path)
        wrote.append(path)
    if args.format in ("svg", "both"):
        from .export import export_svg  # matplotlib import deferred off the csv path

        tp = os.path.join(args.out, f"{scenario.name}_trajectory.svg")
        ep = os.path.join(args.out, f"{scenario.name}_errors.svg")
        export_svg(log, tp, ep)
        wrote.extend([tp, ep])
    for path in wrote:
        print(path)
    return EXIT_OK


def _cmd_validate(args) -> int:
    scenario = resolve_scenario(args.scenario)
    print(f"ok: {scenario.name} ({scenario.n_uavs} uavs, "
          f"{scenario.duration:g} s at h={scenario.step:g}, "
          f"profile {scenario.profile.kind})")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    handler = {"feasibility": _cmd_feasibility,
               "simulate": _cmd_simulate,
               "validate": _cmd_validate}[args.command]
    try:
        return handler(args)
    except (ScenarioError, InfeasibleScenario, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SCENARIO
    except SimulationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SINGULARITY
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
